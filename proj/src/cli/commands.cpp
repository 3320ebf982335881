// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/cli/commands.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "icnet/builder.hpp"
#include "icnet/errors.hpp"
#include "icnet/expr.hpp"
#include "icnet/fixtures.hpp"
#include "icnet/serialize.hpp"
#include "icnet/verify.hpp"

namespace icnet::cli {

namespace {

double default_budget() {
    const char* env = std::getenv("ICNET_BUDGET");
    if (env == nullptr || *env == '\0') {
        return kDefaultBuildBudget;
    }
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (*end != '\0' || !(v > 0.0)) {
        throw std::invalid_argument(std::string("ICNET_BUDGET must be a positive number, got '") + env + "'");
    }
    return v;
}

// "@path" reads the expression from a file.
std::string expression_text(const std::string& arg) {
    if (arg.empty() || arg[0] != '@') {
        return arg;
    }
    std::string text = read_text_file(arg.substr(1));
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())) != 0) {
        text.pop_back();
    }
    return text;
}

std::vector<FuncExpr> parse_all(const std::vector<std::string>& args, const BoxRegion& domain) {
    std::vector<FuncExpr> fs;
    for (const std::string& a : args) {
        FuncExpr f = parse(expression_text(a), domain.dim(), domain);
        fs.push_back(std::move(f));
    }
    return fs;
}

struct BuildArgs {
    std::vector<std::string> exprs;
    std::string domain;
    std::vector<double> deltas;
    std::string out;
    std::string report;
    double budget = 0.0;
    std::size_t sample_budget = kDefaultSampleBudget;
    bool no_prune = false;
};

int cmd_build(const BuildArgs& a, std::ostream& out) {
    const BoxRegion domain = parse_domain(a.domain);
    const std::vector<FuncExpr> fs = parse_all(a.exprs, domain);
    std::vector<double> deltas = a.deltas;
    if (deltas.size() == 1) {
        deltas.assign(fs.size(), deltas[0]);
    }
    if (deltas.size() != fs.size()) {
        throw std::invalid_argument("give one --delta, or one per --expr");
    }
    BuildOptions opt;
    opt.budget = a.budget;
    opt.prune = !a.no_prune;
    opt.sample_budget = a.sample_budget;
    const VectorBuildResult r = build_vector_valued(fs, deltas, opt);
    save_network(r.net, a.out);
    const std::string report = a.report.empty() ? a.out + ".report.json" : a.report;
    write_text_file(report, report_document(r.reports));
    for (std::size_t j = 0; j < r.reports.size(); ++j) {
        const BuildReport& b = r.reports[j];
        out << "output " << j << ": " << b.expr << "\n"
            << "  lipschitz " << format_real(b.lipschitz) << ", range [" << format_real(b.xi_min) << ", "
            << format_real(b.xi_max) << "]\n"
            << "  N " << b.N << ", delta' " << format_real(b.delta_prime) << ", M " << b.M << ", bumps " << b.bumps
            << (b.constant ? ", constant" : "") << "\n";
    }
    const NetworkStats st = stats(r.net);
    out << "network: " << st.nodes << " nodes, " << st.relu_units << " relu units, depth " << st.depth << "\n"
        << "wrote " << a.out << " and " << report << "\n";
    return kExitOk;
}

int cmd_propagate(const std::string& net_path, const std::string& box_text, std::ostream& out) {
    const Network net = load_network(net_path);
    const BoxRegion box = parse_domain(box_text);
    const BoxRegion y = net.eval_abstract(box);
    for (std::size_t j = 0; j < y.dim(); ++j) {
        out << "[" << format_real(y[j].lo()) << ", " << format_real(y[j].hi()) << "]\n";
    }
    return kExitOk;
}

int cmd_verify(const std::string& net_path, const std::vector<std::string>& exprs, const RunConfig& cfg,
               const std::string& out_path, std::ostream& out) {
    const Network net = load_network(net_path);
    const NetworkInfo info = network_info(net);
    const std::vector<FuncExpr> fs = parse_all(exprs, info.domain);
    const VerificationReport rep = verify_network(net, fs, info, cfg);
    if (!out_path.empty()) {
        write_text_file(out_path, rep.document());
    }
    std::string dp;
    for (std::size_t j = 0; j < info.delta_prime.size(); ++j) {
        dp += (j ? "," : "") + format_real(info.delta_prime[j]);
    }
    out << "boxes tested: " << rep.summary.boxes << "\n"
        << "records: " << rep.summary.records << "\n"
        << "failures: " << rep.summary.failures << "\n"
        << "inconclusive: " << rep.summary.inconclusive << "\n"
        << "max violation: " << format_real(rep.summary.max_violation) << "\n"
        << "delta': " << dp << "\n"
        << "seed: " << cfg.seed << "\n"
        << "runtime: " << rep.wall_seconds << " s\n";
    if (rep.summary.failures > 0) {
        return kExitFailures;
    }
    return rep.summary.inconclusive > 0 ? kExitBudget : kExitOk;
}

int cmd_fixtures(const std::string& name, const std::string& out_path, std::ostream& out) {
    save_network(fixture_by_name(name), out_path);
    out << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& net_path, const std::vector<std::string>& exprs, std::size_t samples,
             const std::string& out_path, std::ostream& out) {
    const Network net = load_network(net_path);
    if (net.input_dim() > 2) {
        throw DimensionError("plot-data needs input dimension 1 or 2, network has " +
                             std::to_string(net.input_dim()));
    }
    const NetworkInfo info = network_info(net);
    const std::vector<FuncExpr> fs = parse_all(exprs, info.domain);
    write_text_file(out_path, plot_table(net, fs, info.domain, samples));
    out << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_stats(const std::string& net_path, std::ostream& out) {
    const Network net = load_network(net_path);
    const NetworkStats st = stats(net);
    const std::size_t m = net.input_dim();
    out << "input_dim=" << m << "\n"
        << "output_dim=" << net.output_dim() << "\n"
        << "nodes=" << st.nodes << "\n"
        << "affine_nodes=" << st.affine_nodes << "\n"
        << "relu_units=" << st.relu_units << "\n"
        << "parameters=" << st.parameters << "\n"
        << "depth=" << st.depth << "\n"
        << "bump_relu_units=" << bump_relu_units(m) << "\n"
        << "bump_relu_formula=" << bump_relu_formula(m) << "\n";
    for (const auto& [k, v] : net.metadata()) {
        if (v.find('\n') == std::string::npos) {
            out << "meta." << k << "=" << v << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Build ReLU networks with certified interval bounds and check them."};
    app.require_subcommand(1);

    BuildArgs build;
    auto* b = app.add_subcommand("build", "Build a network for one or more expressions");
    b->add_option("--expr", build.exprs, "Expression in x0, x1, ... (or @file); repeat for vector outputs")->required();
    b->add_option("--domain", build.domain, "Box domain lo,hi;lo,hi;...")->required();
    b->add_option("--delta", build.deltas, "Target tolerance; one, or one per --expr")->required();
    b->add_option("--out", build.out, "Network file to write")->required();
    b->add_option("--report", build.report, "Build report file (default <out>.report.json)");
    b->add_option("--budget", build.budget, "Maximum hyperrectangles x slices (default $ICNET_BUDGET or 5e6)");
    b->add_option("--sample-budget", build.sample_budget, "Maximum oracle samples for the range");
    b->add_flag("--no-prune", build.no_prune, "Keep every member hyperrectangle, not only the maximal ones");

    std::string net_path;
    std::string box_text;
    auto* p = app.add_subcommand("propagate", "Propagate a box through a network");
    p->add_option("--net", net_path, "Network file")->required();
    p->add_option("--box", box_text, "Box lo,hi;lo,hi;...")->required();

    RunConfig cfg;
    std::vector<std::string> exprs;
    std::string out_path;
    auto* v = app.add_subcommand("verify", "Check the interval sandwich on random boxes");
    v->add_option("--net", net_path, "Network file")->required();
    v->add_option("--expr", exprs, "Target expression per output (or @file)")->required();
    v->add_option("--boxes", cfg.boxes, "Number of random boxes")->capture_default_str();
    v->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    v->add_option("--tolerance", cfg.tolerance, "Floating-point slack in inclusion checks")->capture_default_str();
    v->add_option("--margin", cfg.margin, "Starting oracle margin (default delta'/64)");
    v->add_option("--sample-budget", cfg.sample_budget, "Oracle samples allowed per box")->capture_default_str();
    v->add_option("--refinements", cfg.max_refinements, "Margin refinements before a box is inconclusive")
        ->capture_default_str();
    v->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
    v->add_option("--out", out_path, "Report file to write");

    std::string name;
    auto* f = app.add_subcommand("fixtures", "Write one of the two-layer example networks");
    f->add_option("--name", name, "fig2-n1 or fig2-n2")->required()->check(CLI::IsMember(fixture_names()));
    f->add_option("--out", out_path, "Network file to write")->required();

    std::size_t samples = 101;
    auto* pd = app.add_subcommand("plot-data", "Tabulate f, n and cell bounds on a grid (m <= 2)");
    pd->add_option("--net", net_path, "Network file")->required();
    pd->add_option("--expr", exprs, "Target expression per output (or @file)")->required();
    pd->add_option("--samples", samples, "Samples per axis")->capture_default_str();
    pd->add_option("--out", out_path, "CSV file to write")->required();

    auto* s = app.add_subcommand("stats", "Print network size statistics");
    s->add_option("--net", net_path, "Network file")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (b->parsed()) {
            if (build.budget == 0.0) {
                build.budget = default_budget();
            }
            return cmd_build(build, out);
        }
        if (p->parsed()) {
            return cmd_propagate(net_path, box_text, out);
        }
        if (v->parsed()) {
            return cmd_verify(net_path, exprs, cfg, out_path, out);
        }
        if (f->parsed()) {
            return cmd_fixtures(name, out_path, out);
        }
        if (pd->parsed()) {
            return cmd_plot(net_path, exprs, samples, out_path, out);
        }
        if (s->parsed()) {
            return cmd_stats(net_path, out);
        }
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace icnet::cli
