// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "icnet/builder.hpp"
#include "icnet/errors.hpp"
#include "icnet/serialize.hpp"

namespace icnet {

std::string_view status_name(SandwichStatus s) {
    switch (s) {
    case SandwichStatus::holds:
        return "holds";
    case SandwichStatus::vacuous:
        return "vacuous";
    case SandwichStatus::violated:
        return "violated";
    case SandwichStatus::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

std::vector<LabeledBox> verification_boxes(const BoxRegion& domain, std::size_t count, std::uint64_t seed) {
    std::vector<LabeledBox> out;
    if (count == 0) {
        return out;
    }
    const std::size_t m = domain.dim();
    std::mt19937_64 rng(seed);
    const auto uniform = [&](const Interval& iv) {
        const double t = static_cast<double>(rng() >> 11) * 0x1p-53;
        return iv.lo() + iv.width() * t;
    };
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> a(m);
        std::vector<double> b(m);
        for (std::size_t k = 0; k < m; ++k) {
            a[k] = uniform(domain[k]);
        }
        for (std::size_t k = 0; k < m; ++k) {
            b[k] = uniform(domain[k]);
        }
        std::vector<Interval> iv;
        for (std::size_t k = 0; k < m; ++k) {
            iv.emplace_back(std::min(a[k], b[k]), std::max(a[k], b[k]));
        }
        out.push_back({BoxRegion{std::move(iv)}, "random"});
    }
    out.push_back({domain, "domain"});
    if (m <= 5) {
        std::size_t total = 1;
        for (std::size_t k = 0; k < m; ++k) {
            total *= 5;
        }
        std::vector<double> p(m);
        for (std::size_t j = 0; j < total; ++j) {
            std::size_t r = j;
            for (std::size_t k = m; k-- > 0;) {
                const auto i = static_cast<double>(r % 5);
                r /= 5;
                p[k] = i == 4.0 ? domain[k].hi() : domain[k].lo() + domain[k].width() * (i / 4.0);
            }
            out.push_back({BoxRegion::point(p), "lattice"});
        }
    }
    if (m == 1 && domain[0] == Interval{-2.0, 2.0}) {
        out.push_back({BoxRegion{Interval{-1.0, 1.0}}, "reference"});
    }
    return out;
}

namespace {

struct Decision {
    SandwichStatus status = SandwichStatus::inconclusive;
    double violation = 0.0;
};

// n# within [l - d, u + d] for every admissible (l, u).
Decision decide_upper(const Interval& p, double ls, double us, double mu, double d, double tol) {
    if (p.lo() >= ls - d - tol && p.hi() <= us + d + tol) {
        return {SandwichStatus::holds, 0.0};
    }
    const double below = (ls - mu - d - tol) - p.lo();
    const double above = p.hi() - (us + mu + d + tol);
    if (below > 0.0 || above > 0.0) {
        return {SandwichStatus::violated, std::max(below, above) + tol};
    }
    return {};
}

// [l + d, u - d] within n# for every admissible (l, u).
Decision decide_lower(const Interval& p, double ls, double us, double mu, double d, double tol) {
    const double strict_lo = ls - mu + d;
    const double strict_hi = us + mu - d;
    if (strict_lo > strict_hi) {
        return {SandwichStatus::vacuous, 0.0};
    }
    if (p.lo() <= strict_lo + tol && p.hi() >= strict_hi - tol) {
        return {SandwichStatus::holds, 0.0};
    }
    const double lenient_lo = ls + d;
    const double lenient_hi = us - d;
    if (lenient_lo <= lenient_hi) {
        const double left = p.lo() - (lenient_lo + tol);
        const double right = (lenient_hi - tol) - p.hi();
        if (left > 0.0 || right > 0.0) {
            return {SandwichStatus::violated, std::max(left, right) + tol};
        }
    }
    return {};
}

} // namespace

BoxRecord check_sandwich(const Network& net, std::size_t component, const FuncExpr& f, const LabeledBox& box,
                         double delta_prime, const RunConfig& config) {
    BoxRecord rec;
    rec.component = component;
    rec.box = box;
    rec.propagated = net.eval_abstract(box.box)[component];
    double mu = config.margin > 0.0 ? config.margin : delta_prime / 64.0;
    for (std::size_t round = 0; round <= config.max_refinements; ++round) {
        BoxExtrema ext;
        try {
            ext = certified_box_extrema(f, box.box, mu, config.sample_budget);
        } catch (const BudgetExceeded&) {
            break;
        }
        rec.l = ext.min.sampled;
        rec.u = ext.max.sampled;
        rec.margin = ext.min.margin;
        const Decision up = decide_upper(rec.propagated, rec.l, rec.u, rec.margin, delta_prime, config.tolerance);
        const Decision lo = decide_lower(rec.propagated, rec.l, rec.u, rec.margin, delta_prime, config.tolerance);
        rec.upper = up.status;
        rec.lower = lo.status;
        rec.violation = std::max(up.violation, lo.violation);
        if (up.status != SandwichStatus::inconclusive && lo.status != SandwichStatus::inconclusive) {
            break;
        }
        // One definite failure settles the box.
        if (rec.failed() || rec.margin == 0.0) {
            break;
        }
        mu = rec.margin / 8.0;
    }
    return rec;
}

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        out.push_back(parse_real(std::string_view(text).substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

} // namespace

NetworkInfo network_info(const Network& net) {
    const Metadata& md = net.metadata();
    const auto dom = md.find("domain");
    const auto dp = md.find("delta_prime");
    if (dom == md.end() || dp == md.end()) {
        throw SchemaError("network metadata lacks 'domain' or 'delta_prime'; was it produced by build?");
    }
    NetworkInfo info;
    try {
        info.domain = parse_domain(dom->second);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("metadata 'domain': ") + e.what());
    }
    info.delta_prime = parse_list(dp->second);
    if (info.domain.dim() != net.input_dim()) {
        throw SchemaError("metadata domain dimension differs from the network input dimension");
    }
    if (info.delta_prime.size() != net.output_dim()) {
        throw SchemaError("metadata lists " + std::to_string(info.delta_prime.size()) + " delta' values for " +
                          std::to_string(net.output_dim()) + " outputs");
    }
    return info;
}

VerificationReport verify_network(const Network& net, const std::vector<FuncExpr>& fs, const NetworkInfo& info,
                                  const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t outs = net.output_dim();
    if (fs.size() != outs) {
        throw DimensionError("need one expression per network output (" + std::to_string(outs) + "), got " +
                             std::to_string(fs.size()));
    }
    for (const FuncExpr& f : fs) {
        if (f.dim != net.input_dim()) {
            throw DimensionError("expression dimension differs from the network input dimension");
        }
    }
    VerificationReport rep;
    rep.config = config;
    rep.domain = info.domain;
    rep.delta_prime = info.delta_prime;
    for (const FuncExpr& f : fs) {
        rep.exprs.push_back(f.source.empty() ? to_string(f.expr) : f.source);
    }
    const std::vector<LabeledBox> boxes = verification_boxes(info.domain, config.boxes, config.seed);
    rep.records.resize(boxes.size() * outs);

    unsigned threads = config.threads != 0 ? config.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, rep.records.size())));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t r = next++; r < rep.records.size(); r = next++) {
            const std::size_t b = r / outs;
            const std::size_t j = r % outs;
            BoxRecord rec = check_sandwich(net, j, fs[j], boxes[b], info.delta_prime[j], config);
            rec.index = b;
            rep.records[r] = std::move(rec);
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    rep.summary.boxes = boxes.size();
    rep.summary.records = rep.records.size();
    for (const BoxRecord& r : rep.records) {
        if (r.failed()) {
            ++rep.summary.failures;
        } else if (r.inconclusive()) {
            ++rep.summary.inconclusive;
        }
        rep.summary.max_violation = std::max(rep.summary.max_violation, r.violation);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string VerificationReport::document() const {
    nlohmann::ordered_json doc;
    doc["format"] = "icnet-verify-report";
    doc["version"] = 1;
    doc["config"] = {{"seed", config.seed},
                     {"boxes", config.boxes},
                     {"tolerance", config.tolerance},
                     {"margin", config.margin},
                     {"sample_budget", config.sample_budget},
                     {"max_refinements", config.max_refinements},
                     {"expr", exprs},
                     {"domain", format_domain(domain)},
                     {"delta_prime", delta_prime}};
    doc["summary"] = {{"boxes", summary.boxes},
                      {"records", summary.records},
                      {"failures", summary.failures},
                      {"inconclusive", summary.inconclusive},
                      {"max_violation", summary.max_violation}};
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const BoxRecord& r : records) {
        nlohmann::ordered_json j;
        j["index"] = r.index;
        j["component"] = r.component;
        j["origin"] = r.box.origin;
        j["box"] = format_domain(r.box.box);
        j["l"] = r.l;
        j["u"] = r.u;
        j["margin"] = r.margin;
        j["propagated"] = {r.propagated.lo(), r.propagated.hi()};
        j["lower"] = std::string(status_name(r.lower));
        j["upper"] = std::string(status_name(r.upper));
        j["violation"] = r.violation;
        recs.push_back(std::move(j));
    }
    doc["records"] = std::move(recs);
    return doc.dump(1) + "\n";
}

std::string plot_table(const Network& net, const std::vector<FuncExpr>& fs, const BoxRegion& domain,
                       std::size_t samples) {
    const std::size_t m = net.input_dim();
    if (m > 2) {
        throw DimensionError("plot data needs input dimension 1 or 2, got " + std::to_string(m));
    }
    if (domain.dim() != m || fs.size() != net.output_dim()) {
        throw DimensionError("plot data needs a domain of the input dimension and one expression per output");
    }
    if (samples == 0) {
        throw std::invalid_argument("samples must be positive");
    }
    const auto coord = [&](std::size_t k, std::size_t i) {
        if (samples == 1) {
            return domain[k].lo();
        }
        if (i + 1 == samples) {
            return domain[k].hi();
        }
        return domain[k].lo() + domain[k].width() * (static_cast<double>(i) / static_cast<double>(samples - 1));
    };
    const std::size_t outs = fs.size();
    std::ostringstream os;
    for (std::size_t k = 0; k < m; ++k) {
        os << (k ? "," : "") << 'x' << k;
    }
    for (std::size_t j = 0; j < outs; ++j) {
        const std::string s = outs == 1 ? "" : std::to_string(j);
        os << ",f" << s << ",n" << s << ",cell_lo" << s << ",cell_hi" << s;
    }
    os << '\n';
    std::size_t rows = 1;
    for (std::size_t k = 0; k < m; ++k) {
        rows *= samples;
    }
    std::vector<std::size_t> idx(m, 0);
    std::vector<double> x(m);
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<Interval> cell;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] = coord(k, idx[k]);
            const double hi = idx[k] + 1 < samples ? coord(k, idx[k] + 1) : x[k];
            cell.emplace_back(x[k], hi);
        }
        const std::vector<double> y = net.eval_concrete(x);
        const BoxRegion b = net.eval_abstract(BoxRegion{std::move(cell)});
        for (std::size_t k = 0; k < m; ++k) {
            os << (k ? "," : "") << format_real(x[k]);
        }
        for (std::size_t j = 0; j < outs; ++j) {
            os << ',' << format_real(eval(fs[j], x)) << ',' << format_real(y[j]) << ',' << format_real(b[j].lo())
               << ',' << format_real(b[j].hi());
        }
        os << '\n';
        for (std::size_t k = m; k-- > 0;) {
            if (++idx[k] < samples) {
                break;
            }
            idx[k] = 0;
        }
    }
    return os.str();
}

} // namespace icnet
