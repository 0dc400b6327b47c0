#include "nep/cli.hpp"

#include <cmath>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "nep/bounds.hpp"
#include "nep/coding.hpp"
#include "nep/errors.hpp"
#include "nep/oracle.hpp"
#include "sources_config.hpp"
#include "table.hpp"

namespace nep::cli {

namespace {

struct Common {
    std::string output;
    std::string format = "csv";
    bool bits = false;
};

struct Commands {
    SourceFlags source;
    std::string side = "right";
    std::string lambda_grid;
    std::string delta_grid;
    std::string n_grid;
    std::string epsilon_grid;
    double berry = 0.56;
    int depth = 0;
    bool no_exact = false;
    std::int64_t mc_samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> alpha;
    std::optional<double> rate_offset;
    std::optional<double> rate;
};

Side parse_side(const std::string& s) {
    if (s == "right") return Side::right;
    if (s == "left") return Side::left;
    throw ConfigError("--side must be right or left");
}

void add_source_flags(CLI::App* app, SourceFlags& f) {
    app->add_option("--pmf", f.pmf, "probability vector, comma separated");
    app->add_option("--joint", f.joint, "CSV matrix p(x,y), rows indexed by x");
    app->add_option("--quantity", f.quantity, "conditional (default) or mi, for --joint/--bsc/--bigc");
    app->add_option("--bsc", f.bsc, "binary symmetric channel crossover, uniform input");
    app->add_option("--bigc", f.bigc, "binary-input Gaussian channel noise sigma");
    app->add_option("--nodes", f.nodes, "Gauss-Hermite nodes for --bigc");
    app->add_option("--type", f.type, "input type t for the divergence spectrum");
    app->add_option("--channel", f.channel, "CSV matrix p(y|x) for --type");
}

Cell num(double v) { return v; }

Table rate_curve_cmd(const Commands& c) {
    const auto src = build_source(c.source);
    const Side side = parse_side(c.side);
    if (c.lambda_grid.empty() == c.delta_grid.empty()) throw ConfigError("rate-curve needs exactly one of --lambda or --delta");
    Table t{"rate-curve", {{"lambda", 0}, {"delta", 1}, {"rate", 1}, {"sigma2", 2}, {"m3", 3}}, {}};
    std::vector<RatePoint> pts;
    if (!c.lambda_grid.empty()) {
        const auto grid = parse_grid(c.lambda_grid, "--lambda");
        for (double l : grid) {
            if (l < 0.0) throw ConfigError("--lambda values must be >= 0");
        }
        pts = rate_curve(src.spectrum, side, grid);
    } else {
        for (double d : parse_grid(c.delta_grid, "--delta")) pts.push_back(rate_at(src.spectrum, side, d));
    }
    for (const auto& p : pts) t.rows.push_back({num(p.lambda), num(p.delta), num(p.rate), num(p.sigma2), num(p.m3)});
    return t;
}

template <typename F>
Cell maybe(F&& f) {
    try {
        return f();
    } catch (const DeltaOutOfRange&) {
        return std::monostate{};
    } catch (const TooLarge&) {
        return std::monostate{};
    }
}

Table tail_bound_cmd(const Commands& c) {
    const auto src = build_source(c.source);
    const Side side = parse_side(c.side);
    if (c.delta_grid.empty() || c.n_grid.empty()) throw ConfigError("tail-bound needs --delta and --n");
    if (!(c.berry > 0.0 && c.berry < 1.0)) throw ConfigError("--berry-constant must lie in (0, 1)");
    if (c.depth < 0) throw ConfigError("--depth must be >= 0");
    if (c.mc_samples < 0) throw ConfigError("--mc-samples must be >= 0");
    const auto deltas = parse_grid(c.delta_grid, "--delta");
    const auto ns = parse_int_grid(c.n_grid, "--n");
    const BoundOptions opts{c.berry};

    Table t{"tail-bound", {{"delta", 1}, {"n", 0}, {"weak_up", 0}, {"strong_lo", 0}, {"strong_up", 0},
                           {"clt_lo", 0}, {"clt_up", 0}}, {}};
    if (c.depth > 0) {
        t.columns.push_back({"tight_lo", 0});
        t.columns.push_back({"tight_up", 0});
    }
    for (const char* name : {"exact", "mc", "mc_ci_low", "mc_ci_high"}) t.columns.push_back({name, 0});

    for (auto n : ns) {
        std::optional<SpectrumDistribution> dist;
        if (src.exact_available && !c.no_exact) {
            try {
                dist = exact_distribution_composite(src.spectrum, type_counts(src.spectrum, n));
            } catch (const TooLarge&) {
            } catch (const DomainError&) {
            }
        }
        for (double d : deltas) {
            if (d < 0.0) throw ConfigError("--delta values must be >= 0");
            std::vector<Cell> row{num(d), Cell{n}};
            row.push_back(maybe([&] { return Cell{weak_tail_bound(src.spectrum, side, d, n).upper}; }));
            const Cell slo = maybe([&] { return Cell{strong_tail_bounds(src.spectrum, side, d, n, opts).lower}; });
            const Cell sup = maybe([&] { return Cell{strong_tail_bounds(src.spectrum, side, d, n, opts).upper}; });
            row.push_back(slo);
            row.push_back(sup);
            const auto clt = clt_window_bounds(src.spectrum, side, d, n, opts);
            row.push_back(num(clt.lower));
            row.push_back(num(clt.upper));
            if (c.depth > 0) {
                TailBoundResult tight;
                bool ok = true;
                try {
                    tight = recursive_tighten(src.spectrum, side, d, n, c.depth, opts);
                } catch (const DeltaOutOfRange&) {
                    ok = false;
                }
                row.push_back(ok ? Cell{tight.lower} : Cell{});
                row.push_back(ok ? Cell{tight.upper} : Cell{});
            }
            if (dist) {
                const double thr = side == Side::right ? src.spectrum.mean() + d : src.spectrum.mean() - d;
                row.push_back(num(dist->tail(side, thr)));
            } else {
                row.push_back(Cell{});
            }
            if (c.mc_samples > 0) {
                const auto mc = mc_tail(src.spectrum, side, d, n, c.mc_samples, c.seed);
                row.push_back(num(mc.estimate));
                row.push_back(num(mc.ci_low));
                row.push_back(num(mc.ci_high));
            } else {
                row.insert(row.end(), 3, Cell{});
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

const DiscreteDistribution& require_pmf(const Source& s, const char* cmd) {
    if (!s.pmf) throw ConfigError(std::string(cmd) + " needs a --pmf source");
    return *s.pmf;
}

Table coding_cmd(const Commands& c) {
    const auto src = build_source(c.source);
    const auto& p = require_pmf(src, "coding");
    if (c.epsilon_grid.empty() || c.n_grid.empty()) throw ConfigError("coding needs --epsilon and --n");
    const auto eps = parse_grid(c.epsilon_grid, "--epsilon");
    const auto ns = parse_int_grid(c.n_grid, "--n");
    const BoundOptions opts{c.berry};

    Table t{"coding", {{"n", 0}, {"epsilon", 0}, {"rate_lower", 1}, {"rate_upper", 1}, {"exact_rate", 1},
                       {"delta_bar", 1}, {"delta_under", 1}, {"d_used", 0},
                       {"gap_a_upper", 1}, {"gap_a_lower", 1}, {"gap_d_upper", 1}, {"gap_d_lower", 1}}, {}};
    if (c.alpha) {
        t.columns.push_back({"gap_b", 1});
        t.columns.push_back({"gap_c", 1});
    }
    t.columns.push_back({"flags", 0});

    for (auto n : ns) {
        for (double e : eps) {
            if (!(e > 0.0 && e < 1.0)) throw ConfigError("--epsilon values must lie in (0, 1)");
            const auto b = coding_bracket(p, e, n, !c.no_exact, opts);
            std::vector<Cell> row{Cell{n}, num(e), num(b.rate_lower), num(b.rate_upper)};
            row.push_back(b.exact_rate ? Cell{*b.exact_rate} : Cell{});
            row.push_back(num(b.delta_bar));
            row.push_back(num(b.delta_under));
            row.push_back(num(b.d_used));
            RegimeParams rp;
            rp.epsilon = e;
            rp.log_epsilon = std::log(e);
            rp.berry_constant = c.berry;
            auto gap = [&](Regime r) -> std::optional<GapPair> {
                try {
                    return asymptotic_gap(r, p, rp, n);
                } catch (const ParamOutOfRange&) {
                    return std::nullopt;
                }
            };
            const auto ga = gap(Regime::a);
            row.push_back(ga ? Cell{ga->gap_upper} : Cell{});
            row.push_back(ga ? Cell{ga->gap_lower} : Cell{});
            const auto gd = gap(Regime::d);
            row.push_back(gd ? Cell{gd->gap_upper} : Cell{});
            row.push_back(gd ? Cell{gd->gap_lower} : Cell{});
            if (c.alpha) {
                rp.alpha = *c.alpha;
                const auto gb = gap(Regime::b);
                const auto gc = gap(Regime::c);
                row.push_back(gb ? Cell{gb->gap_upper} : Cell{});
                row.push_back(gc ? Cell{gc->gap_upper} : Cell{});
            }
            std::string flags;
            auto flag = [&](bool on, const char* name) {
                if (!on) return;
                if (!flags.empty()) flags += ';';
                flags += name;
            };
            flag(b.upper_at_entropy, "upper_at_entropy");
            flag(b.upper_point_mass, "upper_point_mass");
            flag(b.lower_vacuous, "lower_vacuous");
            row.push_back(flags);
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table tradeoff_cmd(const Commands& c) {
    const auto src = build_source(c.source);
    const auto& p = require_pmf(src, "coding-tradeoff");
    if (c.n_grid.empty()) throw ConfigError("coding-tradeoff needs --n");
    if (c.rate_offset.has_value() == c.rate.has_value()) {
        throw ConfigError("coding-tradeoff needs exactly one of --rate-offset-bits or --rate");
    }
    const double h = src.spectrum.mean();
    // The offset is relative to the entropy rate, so it reads the same in bits or nats.
    const double rate = c.rate ? *c.rate : h * (1.0 + *c.rate_offset);
    if (!(rate >= 0.0)) throw ConfigError("rate must be non-negative");
    Table t{"coding-tradeoff", {{"n", 0}, {"rate", 1}, {"error", 0}}, {}};
    for (auto n : parse_int_grid(c.n_grid, "--n")) {
        t.rows.push_back({Cell{n}, num(rate), num(optimal_code_error(p, rate, n))});
    }
    return t;
}

Table oracle_cmd(const Commands& c) {
    const auto src = build_source(c.source);
    if (!src.exact_available) throw ConfigError("oracle needs a finite source");
    if (c.n_grid.empty()) throw ConfigError("oracle needs --n");
    Table t{"oracle", {{"n", 0}, {"value", 1}, {"prob", 0}}, {}};
    for (auto n : parse_int_grid(c.n_grid, "--n")) {
        const auto dist = exact_distribution_composite(src.spectrum, type_counts(src.spectrum, n));
        for (const auto& a : dist.atoms) t.rows.push_back({Cell{n}, num(a.value), num(a.prob)});
    }
    return t;
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"Non-asymptotic equipartition bounds, coding brackets and exact oracles"};
    app.require_subcommand(1);
    Common common;
    Commands cmd;
    app.add_option("-o,--output", common.output, "write to this file (atomically) instead of stdout");
    app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--bits", common.bits, "report information quantities in bits");

    auto* rc = app.add_subcommand("rate-curve", "rate function samples (lambda, delta, rate, sigma2, m3)");
    add_source_flags(rc, cmd.source);
    rc->add_option("--side", cmd.side, "right or left");
    rc->add_option("--lambda", cmd.lambda_grid, "tilt grid, e.g. 0:0.05:6");
    rc->add_option("--delta", cmd.delta_grid, "deviation grid");

    auto* tb = app.add_subcommand("tail-bound", "weak, strong and CLT-window tail bounds with oracles");
    add_source_flags(tb, cmd.source);
    tb->add_option("--side", cmd.side, "right or left");
    tb->add_option("--delta", cmd.delta_grid, "deviation grid");
    tb->add_option("--n", cmd.n_grid, "block lengths");
    tb->add_option("--berry-constant", cmd.berry, "Berry-Esseen constant C");
    tb->add_option("--depth", cmd.depth, "recursive tightening depth (0 = off)");
    tb->add_flag("--no-exact", cmd.no_exact, "skip the exact enumeration oracle");
    tb->add_option("--mc-samples", cmd.mc_samples, "Monte Carlo samples (0 = off)");
    tb->add_option("--seed", cmd.seed, "Monte Carlo seed");

    auto* co = app.add_subcommand("coding", "fixed-rate source coding bracket");
    add_source_flags(co, cmd.source);
    co->add_option("--epsilon", cmd.epsilon_grid, "error probabilities");
    co->add_option("--n", cmd.n_grid, "block lengths");
    co->add_option("--berry-constant", cmd.berry, "Berry-Esseen constant C");
    co->add_option("--alpha", cmd.alpha, "exponent for the polynomial-decay regimes");
    co->add_flag("--no-exact", cmd.no_exact, "skip the exact optimal-code oracle");

    auto* ct = app.add_subcommand("coding-tradeoff", "exact optimal-code error at a fixed rate");
    add_source_flags(ct, cmd.source);
    ct->add_option("--n", cmd.n_grid, "block lengths");
    ct->add_option("--rate-offset-bits", cmd.rate_offset, "relative rate offset from entropy, e.g. -0.0021");
    ct->add_option("--rate", cmd.rate, "absolute rate in nats per symbol");

    auto* orc = app.add_subcommand("oracle", "exact law of the normalized information density");
    add_source_flags(orc, cmd.source);
    orc->add_option("--n", cmd.n_grid, "block lengths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Table t;
        if (rc->parsed()) t = rate_curve_cmd(cmd);
        else if (tb->parsed()) t = tail_bound_cmd(cmd);
        else if (co->parsed()) t = coding_cmd(cmd);
        else if (ct->parsed()) t = tradeoff_cmd(cmd);
        else t = oracle_cmd(cmd);
        emit(render(t, common.format == "json" ? Format::json : Format::csv, common.bits), common.output);
    } catch (const ConfigError& e) {
        std::cerr << "nep: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "nep: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "nep: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace nep::cli
