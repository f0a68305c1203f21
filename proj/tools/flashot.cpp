#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "flashot/market_io.hpp"
#include "flashot/optimizer.hpp"
#include "flashot/parser.hpp"
#include "flashot/render.hpp"
#include "flashot/scenarios.hpp"
#include "flashot/serializer.hpp"
#include "flashot/simulation.hpp"
#include "flashot/validator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flashot;

namespace {

// Exit codes are part of the interface.
constexpr int kOk = 0;
constexpr int kIoOrUsage = 1;
constexpr int kDomain = 2;

// Raised for a bad combination of flags that CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    bool json = false;
    std::string params = "bzx_pump_params.json";
};

// Paths that do not exist as given are looked up in the fixture directory.
fs::path resolve(const std::string& given) {
    const fs::path p(given);
    if (fs::exists(p) || p.is_absolute()) return p;
    const fs::path bundled = fixture_dir() / p;
    return fs::exists(bundled) ? bundled : p;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string amounts(const std::vector<AssetAmount>& xs) {
    std::string s;
    for (const auto& a : xs) {
        if (!s.empty()) s += ", ";
        s += fmt::format("{}{:.4f} {}", a.is_debt ? "-" : "", a.quantity, a.ticker);
    }
    return s.empty() ? "-" : s;
}

json amounts_json(const std::vector<AssetAmount>& xs) {
    json out = json::array();
    for (const auto& a : xs) out.push_back({{"ticker", a.ticker}, {"quantity", a.quantity}, {"debt", a.is_debt}});
    return out;
}

json violations_json(const std::vector<Violation>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back({{"constraint", std::string(constraint_label(v.which))}, {"slack", v.slack}});
    return out;
}

void print_findings(const dsl::ValidationReport& r, bool as_json) {
    if (as_json) {
        json out = json::array();
        for (const auto& f : r.findings)
            out.push_back({{"code", f.code},
                           {"severity", f.severity == dsl::Severity::error ? "error" : "warning"},
                           {"statement", f.statement ? json(*f.statement) : json(nullptr)},
                           {"line", f.loc.line},
                           {"message", f.message}});
        std::cout << json{{"valid", r.ok()}, {"findings", out}}.dump(2) << "\n";
        return;
    }
    for (const auto& f : r.findings)
        std::cout << fmt::format("{}:{}: {} {}: {}\n", f.loc.line, f.loc.column,
                                 f.severity == dsl::Severity::error ? "error" : "warning", f.code, f.message);
    std::cout << fmt::format("{} error(s), {} warning(s)\n", r.error_count(), r.warning_count());
}

json result_json(const OptimizationResult& r) {
    return {{"n", r.n},
            {"n1", r.n1},
            {"p_p", r.p_p},
            {"objective", r.objective},
            {"evaluations", r.evaluations},
            {"method", std::string(method_name(r.method))}};
}

void print_result(const OptimizationResult& r) {
    std::cout << fmt::format("n           {:.2f}\n", r.n);
    std::cout << fmt::format("n1          {:.2f}\n", r.n1);
    std::cout << fmt::format("p_p         {:.2f}\n", r.p_p);
    std::cout << fmt::format("objective   {:.2f}\n", r.objective);
    std::cout << fmt::format("evaluations {}\n", r.evaluations);
    std::cout << fmt::format("method      {}\n", method_name(r.method));
}

// ---- subcommands ----

struct SimulateArgs {
    double n = 0, n1 = 0, fee = 0;
    bool contingent = false;
    std::string emit, names;
};

int simulate(const Common& c, const SimulateArgs& a) {
    const MarketParams m = load_market(resolve(c.params));
    SimulationOptions opt;
    opt.flash_loan_fee = a.fee;
    opt.contingent_steps = a.contingent;
    std::optional<AttackTrace> trace;
    try {
        trace = simulate_attack({m, a.n, a.n1}, opt);
    } catch (const InfeasibleAttack& e) {
        if (c.json) {
            std::cout << json{{"feasible", false}, {"violations", violations_json(e.report().violations)}}.dump(2)
                      << "\n";
        } else {
            std::cout << fmt::format("infeasible at n = {:.2f}, n1 = {:.2f}\n", a.n, a.n1);
            for (const auto& v : e.report().violations)
                std::cout << fmt::format("  violated: {} (slack {:.6f})\n", constraint_label(v.which), v.slack);
        }
        return kDomain;
    }
    const AttackTrace& t = *trace;

    if (!a.emit.empty()) {
        const NamingMap names = a.names.empty() ? default_naming() : naming_from_json([&] {
            std::ifstream in(resolve(a.names));
            if (!in) throw std::runtime_error("cannot open " + a.names);
            return json::parse(in);
        }());
        write_file(a.emit, dsl::serialize(trace_to_diagram(t, names)));
    }

    const auto& o = t.outcome;
    if (c.json) {
        json steps = json::array();
        for (const auto& s : t.steps)
            steps.push_back({{"step", s.step_index},
                             {"description", s.description},
                             {"inputs", amounts_json(s.inputs)},
                             {"outputs", amounts_json(s.outputs)},
                             {"internal", amounts_json(s.internal)}});
        std::cout << json{{"feasible", true},
                          {"n", a.n},
                          {"n1", a.n1},
                          {"steps", steps},
                          {"delta_b", o.delta_b},
                          {"delta_e", o.delta_e},
                          {"p_f", o.p_f},
                          {"p_p", o.p_p}}
                         .dump(2)
                  << "\n";
        return kOk;
    }
    std::cout << fmt::format("{:>4}  {:<44}  {:<36}  {}\n", "step", "action", "attacker pays", "attacker receives");
    for (const auto& s : t.steps)
        std::cout << fmt::format("{:>4}  {:<44}  {:<36}  {}\n", s.step_index, s.description, amounts(s.inputs),
                                 amounts(s.outputs));
    std::cout << fmt::format("delta_b     {:.4f} wBTC\n", o.delta_b);
    std::cout << fmt::format("delta_e     {:.4f} ETH\n", o.delta_e);
    std::cout << fmt::format("p_f         {:.2f} ETH\n", o.p_f);
    std::cout << fmt::format("p_p         {:.2f} ETH\n", o.p_p);
    return kOk;
}

int feasible(const Common& c, double n) {
    const MarketParams m = load_market(resolve(c.params));
    const auto intervals = feasible_interval(n, m);
    if (c.json) {
        json out = json::array();
        for (const auto& i : intervals) out.push_back({{"lo", i.lo}, {"hi", i.hi}});
        std::cout << json{{"n", n}, {"intervals", out}}.dump(2) << "\n";
    } else if (intervals.empty()) {
        std::cout << fmt::format("no feasible n1 at n = {:.2f}\n", n);
    } else {
        for (const auto& i : intervals) std::cout << fmt::format("[{:.2f}, {:.2f}]\n", i.lo, i.hi);
    }
    return intervals.empty() ? kDomain : kOk;
}

struct OptimizeArgs {
    std::optional<double> n;
    bool global = false;
    GridSpec grid;
    unsigned workers = 1;
    std::string objective = "predictable";
    std::optional<double> p_eval;
    std::size_t oracle = 0;
    std::string curve;
    std::size_t curve_samples = 500;
};

int optimize(const Common& c, const OptimizeArgs& a) {
    if (a.n.has_value() == a.global) throw UsageError("optimize needs exactly one of --n or --global");
    if (!a.curve.empty() && !a.n) throw UsageError("--curve needs --n");
    const MarketParams m = load_market(resolve(c.params));
    const Objective objective = a.objective == "contingent" ? contingent_inner_objective(a.p_eval.value_or(m.p_m))
                                                            : predictable_profit_objective();

    const auto best = a.n ? maximize_given_n(*a.n, m, a.grid, objective)
                          : maximize_global(m, a.grid, a.workers, objective);
    std::optional<OptimizationResult> oracle;
    if (a.oracle > 0) oracle = brute_force_oracle(m, a.oracle, a.oracle, objective);

    if (!a.curve.empty()) {
        std::string csv = "n1,p_p,feasible\n";
        for (const auto& p : profit_curve(*a.n, m, a.curve_samples))
            csv += fmt::format("{:.6f},{:.6f},{}\n", p.n1, p.p_p, p.feasible ? 1 : 0);
        write_file(a.curve, csv);
    }

    if (c.json) {
        json out = best ? result_json(*best) : json(nullptr);
        if (oracle) out = {{"result", out}, {"oracle", result_json(*oracle)}};
        std::cout << out.dump(2) << "\n";
    } else {
        if (best)
            print_result(*best);
        else
            std::cout << "no feasible point\n";
        if (oracle) {
            std::cout << fmt::format("oracle {}x{}\n", a.oracle, a.oracle);
            print_result(*oracle);
        }
    }
    return best ? kOk : kDomain;
}

int parse_cmd(const Common& c, const std::string& file) {
    const auto d = dsl::parse_file(file);
    if (c.json) {
        std::size_t ratios = d.ratios.size();
        std::cout << json{{"title", d.title},
                          {"assets", d.assets.size()},
                          {"pools", d.pools.size()},
                          {"contracts", d.contracts.size()},
                          {"statements", d.statements.size()},
                          {"ratios", ratios}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << dsl::serialize(d);
    }
    return kOk;
}

int validate_cmd(const Common& c, const std::string& file) {
    const auto r = dsl::validate(dsl::parse_file(file));
    print_findings(r, c.json);
    return r.ok() ? kOk : kDomain;
}

struct RenderArgs {
    std::string file, format = "svg", out;
    int cell_width = 0;
    bool plain = false;
};

int render_cmd(const Common& c, const RenderArgs& a) {
    const auto d = dsl::parse_file(a.file);
    const auto f = a.format == "ascii" ? render::Format::ascii : render::Format::svg;
    auto opts = render::RenderOptions::for_format(f);
    if (a.cell_width > 0) opts.cell_width = a.cell_width;
    opts.highlight_proceeds = !a.plain;
    std::string text;
    try {
        const auto l = render::layout(d, opts);
        text = f == render::Format::svg ? render::render_svg(l, opts) : render::render_ascii(l, opts);
    } catch (const render::InvalidDiagram& e) {
        print_findings(e.report(), c.json);
        return kDomain;
    }
    if (a.out.empty())
        std::cout << text;
    else
        write_file(a.out, text);
    return kOk;
}

int events_cmd(const Common& c, const std::string& type, const std::string& file) {
    const fs::path path = file.empty() ? fixture_dir() / "events.json" : resolve(file);
    const auto rows = list_events(path, type.empty() ? std::nullopt : std::optional(parse_event_type(type)));
    auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
        return s;
    };
    if (c.json) {
        json out = json::array();
        for (const auto& e : rows)
            out.push_back({{"date", e.date},
                           {"label", e.label},
                           {"providers", e.providers},
                           {"protocols", e.protocols},
                           {"type", std::string(event_type_name(e.type))},
                           {"proceeds", e.proceeds}});
        std::cout << out.dump(2) << "\n";
        return kOk;
    }
    std::cout << fmt::format("{:<10}  {:<28}  {:<20}  {:<24}  {}\n", "date", "event", "type", "flash loan from",
                             "proceeds");
    for (const auto& e : rows)
        std::cout << fmt::format("{:<10}  {:<28}  {:<20}  {:<24}  {}\n", e.date, e.label, event_type_name(e.type),
                                 join(e.providers), e.proceeds);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flash-loan pump-and-arbitrage model and Flashot diagram tools"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--json", common.json, "Machine-readable JSON output");

    auto with_params = [&](CLI::App* sub) {
        sub->add_option("-p,--params", common.params, "Market parameter JSON (bundled fixtures are searched too)");
    };

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Replay the attack at (n, n1) and print the trace");
    with_params(s);
    s->add_option("--n", sim.n, "Flash-loan size, ETH")->required();
    s->add_option("--n1", sim.n1, "ETH posted as collateral")->required();
    s->add_option("--fee", sim.fee, "Flash-loan fee, ETH")->check(CLI::NonNegativeNumber);
    s->add_flag("--contingent", sim.contingent, "Also close the margin position and redeem the collateral");
    s->add_option("--emit-flashot", sim.emit, "Write the trace as a Flashot diagram");
    s->add_option("--names", sim.names, "JSON map from generic venue ids to display names");

    double feasible_n = 0;
    auto* fe = app.add_subcommand("feasible", "Feasible n1 intervals at a loan size");
    with_params(fe);
    fe->add_option("--n", feasible_n, "Flash-loan size, ETH")->required();

    OptimizeArgs opt;
    auto* op = app.add_subcommand("optimize", "Maximize profit at a fixed n or over the whole region");
    with_params(op);
    op->add_option("--n", opt.n, "Fix the loan size");
    op->add_flag("--global", opt.global, "Search over n as well");
    op->add_option("--n-step", opt.grid.n_step, "Outer scan step, ETH")->check(CLI::PositiveNumber);
    op->add_option("--samples", opt.grid.n1_samples, "n1 samples per interval")->check(CLI::PositiveNumber);
    op->add_option("--refine-tol", opt.grid.refine_tol, "Golden-section tolerance, ETH")->check(CLI::PositiveNumber);
    op->add_option("--workers", opt.workers, "Threads for the outer scan")->check(CLI::PositiveNumber);
    op->add_option("--objective", opt.objective, "predictable or contingent")
        ->check(CLI::IsMember({"predictable", "contingent"}));
    op->add_option("--p-eval", opt.p_eval, "Closing price for the contingent objective (default p_m)");
    op->add_option("--oracle", opt.oracle, "Also run the brute-force oracle on an N x N grid");
    op->add_option("--curve", opt.curve, "Write the (n1, p_p) curve at --n as CSV");
    op->add_option("--curve-samples", opt.curve_samples, "Points on the curve")->check(CLI::PositiveNumber);

    std::string dsl_file;
    auto* pa = app.add_subcommand("parse", "Parse a diagram and print it in canonical form");
    pa->add_option("file", dsl_file, "Flashot source")->required();
    auto* va = app.add_subcommand("validate", "Check a diagram's semantics");
    va->add_option("file", dsl_file, "Flashot source")->required();

    RenderArgs ren;
    auto* re = app.add_subcommand("render", "Draw a diagram as SVG or text");
    re->add_option("file", ren.file, "Flashot source")->required();
    re->add_option("--format", ren.format, "svg or ascii")->check(CLI::IsMember({"svg", "ascii"}));
    re->add_option("-o,--output", ren.out, "Output file (default stdout)");
    re->add_option("--cell-width", ren.cell_width, "Cell width in pixels (svg) or characters (ascii)")
        ->check(CLI::PositiveNumber);
    re->add_flag("--no-highlight", ren.plain, "Draw proceeds like any other asset");

    std::string event_type, events_file;
    auto* ev = app.add_subcommand("events", "List the catalogued flash-loan attacks");
    ev->add_option("--type", event_type, "Attack type")
        ->check(CLI::IsMember({"pump-and-arbitrage", "oracle-manipulation", "reentrancy"}));
    ev->add_option("--file", events_file, "Alternative catalog");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kIoOrUsage;
    }

    try {
        if (*s) return simulate(common, sim);
        if (*fe) return feasible(common, feasible_n);
        if (*op) return optimize(common, opt);
        if (*pa) return parse_cmd(common, dsl_file);
        if (*va) return validate_cmd(common, dsl_file);
        if (*re) return render_cmd(common, ren);
        if (*ev) return events_cmd(common, event_type, events_file);
    } catch (const dsl::ParseError& e) {
        std::cerr << (dsl_file.empty() ? ren.file : dsl_file) << ":" << e.what() << "\n";
        return kDomain;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kIoOrUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kIoOrUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoOrUsage;
    }
    return kIoOrUsage;
}
