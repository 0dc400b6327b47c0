#include "nep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "nep/errors.hpp"
#include "nep/numeric.hpp"

namespace nep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAtomMerge = 1e-12;
constexpr double kWilsonZ = 1.959963984540054;

double tie_tol(double threshold) { return 1e-12 * std::max(1.0, std::fabs(threshold)); }

bool in_tail(Side side, double value, double threshold, double tol) {
    return side == Side::right ? value > threshold + tol : value <= threshold + tol;
}

// Sort ascending and merge atoms closer than kAtomMerge relative; probabilities via log-sum-exp.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> out;
    std::vector<double> logs;
    std::size_t i = 0;
    while (i < atoms.size()) {
        const double first = atoms[i].value;
        logs.clear();
        std::size_t j = i;
        while (j < atoms.size() &&
               std::fabs(atoms[j].value - first) <= kAtomMerge * std::max(1.0, std::fabs(first))) {
            logs.push_back(atoms[j].log_prob);
            ++j;
        }
        const double lp = logs.size() == 1 ? logs.front() : log_sum_exp(logs);
        out.push_back({first, std::exp(lp), lp});
        i = j;
    }
    return out;
}

// Visits every composition k of n into m parts.
template <typename F>
void for_each_composition(std::int64_t n, std::size_t m, F&& visit) {
    std::vector<std::int64_t> k(m, 0);
    k[0] = n;
    while (true) {
        visit(k);
        if (m == 1) return;
        // Move one unit from the leftmost nonzero slot (below the last) one step right.
        std::size_t i = 0;
        while (i + 1 < m && k[i] == 0) ++i;
        if (i + 1 >= m) return;
        const std::int64_t v = k[i];
        k[i] = 0;
        k[0] = v - 1;
        k[i + 1] += 1;
    }
}

int worker_count(std::int64_t samples) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("NEP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    const std::int64_t useful = std::max<std::int64_t>(1, samples / 1000);
    return static_cast<int>(std::min<std::int64_t>(hw, useful));
}

} // namespace

double SpectrumDistribution::tail(Side side, double threshold) const {
    const double tol = tie_tol(threshold);
    CompensatedSum s;
    for (const auto& a : atoms) {
        if (in_tail(side, a.value, threshold, tol)) s.add(a.prob);
    }
    return std::min(1.0, s.value());
}

double SpectrumDistribution::log_tail(Side side, double threshold) const {
    const double tol = tie_tol(threshold);
    std::vector<double> logs;
    for (const auto& a : atoms) {
        if (in_tail(side, a.value, threshold, tol)) logs.push_back(a.log_prob);
    }
    return std::min(0.0, log_sum_exp(logs));
}

double composition_count(std::int64_t n, std::size_t m) {
    if (m <= 1) return 1.0;
    // C(n+m-1, m-1) by the running product; every partial result is an integer.
    double r = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        r = r * static_cast<double>(n + static_cast<std::int64_t>(i)) / static_cast<double>(i);
        if (r > 1e300) return INFINITY;
    }
    return r;
}

SpectrumDistribution exact_distribution(const ValueSpectrum& spec, std::int64_t n) {
    if (n < 1) throw DomainError("block length n must be >= 1");
    const auto entries = spec.entries();
    const std::size_t m = entries.size();
    const double count = composition_count(n, m);
    if (count > kMaxEnumeration * (1.0 + 1e-9)) {
        throw TooLarge("exact enumeration needs " + std::to_string(count) + " compositions");
    }
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) log_fact[k] = std::lgamma(static_cast<double>(k) + 1.0);
    std::vector<double> log_w(m);
    for (std::size_t i = 0; i < m; ++i) log_w[i] = std::log(entries[i].weight);

    const double nd = static_cast<double>(n);
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(count) + 1);
    for_each_composition(n, m, [&](const std::vector<std::int64_t>& k) {
        CompensatedSum value;
        double lp = log_fact[n];
        for (std::size_t i = 0; i < m; ++i) {
            if (k[i] == 0) continue;
            value.add(static_cast<double>(k[i]) * entries[i].value);
            lp += static_cast<double>(k[i]) * log_w[i] - log_fact[k[i]];
        }
        atoms.push_back({value.value() / nd, 0.0, lp});
    });
    return {merge_atoms(std::move(atoms))};
}

double exact_tail(const ValueSpectrum& spec, Side side, double delta, std::int64_t n) {
    const double threshold = side == Side::right ? spec.mean() + delta : spec.mean() - delta;
    return exact_distribution(spec, n).tail(side, threshold);
}

SpectrumDistribution exact_distribution_composite(const CompositeSpectrum& comp,
                                                  std::span<const std::int64_t> counts) {
    const auto comps = comp.components();
    if (counts.size() != comps.size()) throw DomainError("one count per component is required");
    std::int64_t total = 0;
    for (auto c : counts) {
        if (c < 0) throw DomainError("component counts must be non-negative");
        total += c;
    }
    if (total == 0) throw DomainError("component counts are all zero");

    double work = 1.0;
    for (std::size_t x = 0; x < comps.size(); ++x) {
        if (counts[x] > 0) work *= composition_count(counts[x], comps[x].spectrum.size());
    }
    if (work > kMaxEnumeration * (1.0 + 1e-9)) {
        throw TooLarge("composite enumeration needs " + std::to_string(work) + " atoms");
    }

    // Running law of the partial sum (not the average).
    std::vector<Atom> acc{{0.0, 1.0, 0.0}};
    for (std::size_t x = 0; x < comps.size(); ++x) {
        if (counts[x] == 0) continue;
        const auto part = exact_distribution(comps[x].spectrum, counts[x]);
        const double scale = static_cast<double>(counts[x]);
        std::vector<Atom> next;
        next.reserve(acc.size() * part.atoms.size());
        for (const auto& a : acc) {
            for (const auto& b : part.atoms) next.push_back({a.value + b.value * scale, 0.0, a.log_prob + b.log_prob});
        }
        acc = merge_atoms(std::move(next));
    }
    const double nd = static_cast<double>(total);
    for (auto& a : acc) a.value /= nd;
    return {merge_atoms(std::move(acc))};
}

double exact_tail_composite(const CompositeSpectrum& comp, std::span<const std::int64_t> counts,
                            Side side, double threshold) {
    return exact_distribution_composite(comp, counts).tail(side, threshold);
}

std::uint64_t CounterRng::at(std::uint64_t index) const noexcept {
    std::uint64_t z = seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform_at(std::uint64_t index) const noexcept {
    return static_cast<double>(at(index) >> 11) * 0x1p-53;
}

std::vector<std::int64_t> type_counts(const CompositeSpectrum& comp, std::int64_t n) {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    for (const auto& c : comp.components()) {
        const double k = c.t_weight * static_cast<double>(n);
        const double r = std::round(k);
        if (std::fabs(k - r) > 1e-9 * std::max(1.0, k)) {
            throw DomainError("n times each type weight must be an integer");
        }
        counts.push_back(static_cast<std::int64_t>(r));
        total += counts.back();
    }
    if (total != n) throw DomainError("type counts do not add up to n");
    return counts;
}

McEstimate mc_tail(const CompositeSpectrum& spec, Side side, double delta, std::int64_t n,
                   std::int64_t samples, std::uint64_t seed) {
    if (n < 1) throw DomainError("block length n must be >= 1");
    if (samples < 1) throw DomainError("sample count must be positive");
    const auto counts = type_counts(spec, n);
    const auto comps = spec.components();

    std::vector<std::vector<double>> cdf(comps.size());
    for (std::size_t x = 0; x < comps.size(); ++x) {
        CompensatedSum s;
        for (const auto& e : comps[x].spectrum.entries()) {
            s.add(e.weight);
            cdf[x].push_back(s.value());
        }
        cdf[x].back() = 1.0;
    }

    const double threshold = side == Side::right ? spec.mean() + delta : spec.mean() - delta;
    const double tol = tie_tol(threshold);
    const double nd = static_cast<double>(n);
    const CounterRng rng(seed);

    auto count_hits = [&](std::int64_t begin, std::int64_t end) {
        std::int64_t hits = 0;
        for (std::int64_t s = begin; s < end; ++s) {
            std::uint64_t index = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(n);
            double sum = 0.0;
            for (std::size_t x = 0; x < comps.size(); ++x) {
                const auto entries = comps[x].spectrum.entries();
                for (std::int64_t i = 0; i < counts[x]; ++i) {
                    const double u = rng.uniform_at(index++);
                    auto it = std::upper_bound(cdf[x].begin(), cdf[x].end(), u);
                    const std::size_t k = std::min<std::size_t>(it - cdf[x].begin(), entries.size() - 1);
                    sum += entries[k].value;
                }
            }
            if (in_tail(side, sum / nd, threshold, tol)) ++hits;
        }
        return hits;
    };

    const int workers = worker_count(samples);
    std::int64_t hits = 0;
    if (workers <= 1) {
        hits = count_hits(0, samples);
    } else {
        std::vector<std::int64_t> partial(workers, 0);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t b = samples * w / workers;
            const std::int64_t e = samples * (w + 1) / workers;
            pool.emplace_back([&, w, b, e] { partial[w] = count_hits(b, e); });
        }
        for (auto& t : pool) t.join();
        for (auto h : partial) hits += h;
    }

    const double ns = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / ns;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / ns;
    const double center = (p + z2 / (2.0 * ns)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / ns + z2 / (4.0 * ns * ns)) / denom;
    return {p, std::max(0.0, center - half), std::min(1.0, center + half), hits, samples};
}

} // namespace nep
