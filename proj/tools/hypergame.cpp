#include "hypergame/certificate.hpp"
#include "hypergame/error.hpp"
#include "hypergame/oracle.hpp"
#include "hypergame/prophecy.hpp"
#include "hypergame/service.hpp"
#include "hypergame/solver.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace hypergame;

namespace
{

constexpr int exit_input = 3;

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Prophecy files refer to positions of a strictly alternating prefix.
HyperLtlFormula prophecy_ready(HyperLtlFormula f)
{
    return is_strictly_alternating(f) ? f : normalize_alternating(f);
}

Mode parse_mode(const std::string& m)
{
    if (m == "auto")
        return Mode::automatic;
    if (m == "zielonka")
        return Mode::zielonka;
    if (m == "exists-forall")
        return Mode::exists_forall;
    return Mode::bounded;
}

int verdict_exit(Outcome o)
{
    switch (o) {
    case Outcome::proven: return 0;
    case Outcome::disproven: return 1;
    case Outcome::unknown: return 2;
    }
    return 2;
}

struct CheckArgs
{
    std::string ks, formula, prophecy, mode = "auto", output = "-";
    std::size_t memory = 3;
    std::uint64_t budget = 10'000'000;
};

int cmd_check(const CheckArgs& a)
{
    const auto ks = load_ks(a.ks);
    auto f = load_hyperltl(a.formula);
    ProphecyFamily fam;
    if (!a.prophecy.empty()) {
        f = prophecy_ready(f);
        fam = load_prophecy_family(a.prophecy, f);
    }
    SolveOptions opts;
    opts.mode = parse_mode(a.mode);
    opts.search.memory_bound = a.memory;
    opts.search.budget = a.budget;
    const Verdict v = solve_with_prophecies(ks, f, fam, opts);

    std::cout << "verdict: " << to_string(v.outcome) << "\n";
    if (v.outcome != Outcome::unknown)
        std::cout << "guarantee: " << to_string(v.guarantee)
                  << (v.guarantee == Guarantee::semantic ? " (exact decision)" : " (winning coalition strategy)") << "\n";
    std::cout << "method: " << v.method << "\n";
    if (v.game_lost)
        std::cout << "game: lost by the coalition\n";
    if (v.method == "bounded-search")
        std::cout << "search: memory <= " << v.memory_bound << ", " << v.work << " of " << v.budget << " options"
                  << (v.budget_exhausted ? " (budget exhausted)" : "") << "\n";
    if (!v.note.empty())
        std::cout << "note: " << v.note << "\n";
    if (v.outcome == Outcome::proven) {
        if (v.profile) {
            const std::string text = export_profile(*v.profile);
            if (a.output == "-") {
                std::cout << "certificate:\n" << text;
            } else {
                std::ofstream out(a.output);
                if (!(out << text))
                    throw Error("cannot write '" + a.output + "'");
                std::cout << "certificate: " << a.output << "\n";
            }
        } else {
            std::cout << "certificate: none (decided through the negation)\n";
        }
    }
    return verdict_exit(v.outcome);
}

int cmd_certify(const std::string& ks_path, const std::string& formula_path, const std::string& cert_path,
                const std::string& prophecy_path)
{
    const auto ks = load_ks(ks_path);
    auto f = load_hyperltl(formula_path);
    const auto sp = parse_profile(read_text(cert_path));
    ProphecyFamily fam;
    if (!sp.manifest.empty() || !prophecy_path.empty()) {
        f = prophecy_ready(f);
        if (!sp.manifest.empty())
            fam = parse_manifest(sp.manifest, f);
        if (!prophecy_path.empty()) {
            auto given = load_prophecy_family(prophecy_path, f);
            if (!sp.manifest.empty() && render_manifest(given) != render_manifest(fam))
                throw ValidationError("the prophecy file differs from the certificate's manifest");
            fam = std::move(given);
        }
    }
    const auto g = build_game(ks, f, fam);
    validate_profile(sp, g);
    const auto r = check_profile(g, sp);
    if (r.passed()) {
        std::cout << "certificate: valid\n";
        return 0;
    }
    std::cout << "certificate: invalid\n" << r.diagnostic << "\n";
    return 1;
}

int cmd_oracle(const std::string& ks_path, const std::string& formula_path, std::size_t stem, std::size_t loop)
{
    const auto ks = load_ks(ks_path);
    const auto f = load_hyperltl(formula_path);
    const LassoBudget b{stem, loop};
    const auto traces = enumerate_lassos(ks, b).size();
    const bool holds = oracle_check(ks, f, b);
    std::cout << "oracle: " << (holds ? "true" : "false") << " (stem " << stem << ", loop " << loop << ", " << traces
              << " traces)\n";
    return holds ? 0 : 1;
}

int cmd_serve(const std::string& host, int port, const std::string& fixtures)
{
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    SessionManager sessions(fixtures);
    Server server(sessions);
    const int bound = server.bind(host, port);
    std::cout << "listening on " << host << ":" << bound << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        server.stop();
    });
    server.listen();
    // listen() also returns when the server fails; wake the waiter either way
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Game-based model checking for HyperLTL"};
    app.require_subcommand(0, 1);
    bool version = false;
    app.add_flag("--version", version, "Print the tool and file format versions");

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Decide K |= formula");
    c->add_option("ks", check.ks, "Kripke structure file")->required();
    c->add_option("formula", check.formula, "HyperLTL formula file")->required();
    c->add_option("--prophecy", check.prophecy, "Prophecy family file");
    c->add_option("--mode", check.mode, "auto, zielonka, exists-forall or bounded")
        ->check(CLI::IsMember({"auto", "zielonka", "exists-forall", "bounded"}));
    c->add_option("--memory", check.memory, "Memory states per player for the bounded search")
        ->check(CLI::PositiveNumber);
    c->add_option("--budget", check.budget, "Options the bounded search may try")->check(CLI::PositiveNumber);
    c->add_option("-o,--output", check.output, "Where to write a certificate ('-' for stdout)");

    std::string ks, formula, cert, prophecy;
    auto* v = app.add_subcommand("certify", "Check a strategy certificate");
    v->add_option("ks", ks)->required();
    v->add_option("formula", formula)->required();
    v->add_option("certificate", cert)->required();
    v->add_option("--prophecy", prophecy, "Prophecy family file, when the certificate has no manifest");

    std::size_t stem = 4, loop = 4;
    auto* o = app.add_subcommand("oracle", "Evaluate the formula on bounded lassos");
    o->add_option("ks", ks)->required();
    o->add_option("formula", formula)->required();
    o->add_option("--stem", stem, "Longest stem");
    o->add_option("--loop", loop, "Longest loop");

    std::string host = "127.0.0.1", fixtures;
    int port = 8080;
    auto* s = app.add_subcommand("serve", "Run the interactive session service");
    s->add_option("--bind", host, "Address to bind");
    s->add_option("--port", port, "Port, 0 for any free one")->check(CLI::Range(0, 65535));
    s->add_option("--fixtures", fixtures, "Directory from which sessions may load files by name")
        ->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (version) {
            std::cout << "hypergame 1.0.0\n"
                      << "ks format 1\nformula format 1\nprophecy format 1\n"
                      << "certificate format " << certificate_format_version << "\n"
                      << "hoa format v1\n";
            return 0;
        }
        if (*c)
            return cmd_check(check);
        if (*v)
            return cmd_certify(ks, formula, cert, prophecy);
        if (*o)
            return cmd_oracle(ks, formula, stem, loop);
        if (*s)
            return cmd_serve(host, port, fixtures);
        std::cout << app.help();
        return exit_input;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
}
