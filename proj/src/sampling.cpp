#include "rfem/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rfem/errors.hpp"

namespace rfem {

std::string to_string(AxisDist d)
{
    switch (d) {
    case AxisDist::Uniform:
        return "uniform";
    case AxisDist::Log10:
        return "log10";
    case AxisDist::ReversedLog2:
        return "reversed_log2";
    }
    return "unknown";
}

AxisDist axis_dist_from_string(const std::string& s)
{
    for (auto d : {AxisDist::Uniform, AxisDist::Log10, AxisDist::ReversedLog2})
        if (to_string(d) == s)
            return d;
    throw ConfigError("unknown axis distribution '" + s + "'");
}

std::vector<double> sample_axis(const AxisSpec& a)
{
    if (!(a.lo < a.hi))
        throw ConfigError("axis needs lo < hi");
    if (a.count < 2)
        throw ConfigError("axis needs at least two samples");
    if (a.dist != AxisDist::Uniform && !(a.lo > 0.0))
        throw ConfigError("logarithmic axis needs a positive lower bound");

    const int k = a.count;
    std::vector<double> out(k);
    auto t = [k](int j) { return static_cast<double>(j) / (k - 1); };
    switch (a.dist) {
    case AxisDist::Uniform:
        for (int j = 0; j < k; ++j)
            out[j] = a.lo + (a.hi - a.lo) * t(j);
        break;
    case AxisDist::Log10: {
        const double l0 = std::log10(a.lo), l1 = std::log10(a.hi);
        for (int j = 0; j < k; ++j)
            out[j] = std::pow(10.0, l0 + (l1 - l0) * t(j));
        break;
    }
    case AxisDist::ReversedLog2: {
        // lo + hi - 2^beta, beta equispaced in [log2 lo, log2 hi]; dense near hi
        const double l0 = std::log2(a.lo), l1 = std::log2(a.hi);
        for (int j = 0; j < k; ++j)
            out[j] = a.lo + a.hi - std::exp2(l0 + (l1 - l0) * t(j));
        std::sort(out.begin(), out.end());
        break;
    }
    }
    out.front() = a.lo;
    out.back() = a.hi;
    return out;
}

double encode_axis(const AxisSpec& a, double v)
{
    if (a.dist == AxisDist::Log10)
        return 2.0 * (std::log10(v) - std::log10(a.lo)) / (std::log10(a.hi) - std::log10(a.lo)) - 1.0;
    return 2.0 * (v - a.lo) / (a.hi - a.lo) - 1.0;
}

ParamGrid ParamGrid::build(std::vector<AxisSpec> axes)
{
    if (axes.empty())
        throw ConfigError("parameter grid needs at least one axis");
    ParamGrid g;
    g.axes = std::move(axes);
    std::size_t total = 1;
    for (const AxisSpec& a : g.axes) {
        g.samples.push_back(sample_axis(a));
        total *= a.count;
    }
    const int P = g.dim();
    g.tuples.reserve(total);
    std::vector<int> idx(P, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::vector<double> t(P);
        for (int d = 0; d < P; ++d)
            t[d] = g.samples[d][idx[d]];
        g.tuples.push_back(std::move(t));
        for (int d = P - 1; d >= 0; --d) {
            if (++idx[d] < g.axes[d].count)
                break;
            idx[d] = 0;
        }
    }
    g.forced = forced_tuples(g);
    return g;
}

std::vector<double> ParamGrid::encode(const std::vector<double>& tuple) const
{
    std::vector<double> e(tuple.size());
    for (std::size_t d = 0; d < tuple.size(); ++d)
        e[d] = encode_axis(axes[d], tuple[d]);
    return e;
}

std::vector<int> forced_tuples(const ParamGrid& g)
{
    const int P = g.dim();
    std::set<int> out;
    if (P == 1) {
        const int k = g.axes[0].count;
        for (int j : {0, 1, k - 2, k - 1})
            out.insert(j);
        return {out.begin(), out.end()};
    }
    for (int mask = 0; mask < (1 << P); ++mask) {
        int flat = 0;
        for (int d = 0; d < P; ++d) {
            const int j = (mask >> d) & 1 ? g.axes[d].count - 1 : 0;
            flat = flat * g.axes[d].count + j;
        }
        out.insert(flat);
    }
    return {out.begin(), out.end()};
}

void split_train_test(ParamGrid& g, std::uint64_t seed, double train_fraction, int monitor_size)
{
    const int total = g.size();
    if (total == 0)
        throw ConfigError("cannot split an empty grid");
    const int nforced = static_cast<int>(g.forced.size());
    if (total < nforced + 1)
        throw ConfigError("grid has no tuples left for the test set after forcing the corners");

    std::vector<bool> is_forced(total, false);
    for (int i : g.forced)
        is_forced[i] = true;
    std::vector<int> rest;
    for (int i = 0; i < total; ++i)
        if (!is_forced[i])
            rest.push_back(i);

    std::mt19937_64 rng(seed);
    std::shuffle(rest.begin(), rest.end(), rng);
    const int want = static_cast<int>(std::lround(train_fraction * total));
    const int extra = std::clamp(want - nforced, 0, static_cast<int>(rest.size()) - 1);

    g.train = g.forced;
    g.train.insert(g.train.end(), rest.begin(), rest.begin() + extra);
    g.test.assign(rest.begin() + extra, rest.end());
    std::sort(g.train.begin(), g.train.end());
    std::sort(g.test.begin(), g.test.end());

    std::vector<int> pool = g.test;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(std::max(monitor_size, 0))));
    g.monitor = pool;
}

} // namespace rfem
