#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfem {

enum class AxisDist { Uniform, Log10, ReversedLog2 };

std::string to_string(AxisDist d);
AxisDist axis_dist_from_string(const std::string& s);

struct AxisSpec {
    AxisDist dist = AxisDist::Uniform;
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;

    bool operator==(const AxisSpec&) const = default;
};

/// Samples sorted ascending; endpoints are lo and hi exactly.
/// Throws ConfigError for lo >= hi, count < 2 or nonpositive lo on log axes.
std::vector<double> sample_axis(const AxisSpec& axis);

/// Network input for one parameter: affine map of the value (log10 of it on
/// log10 axes) to [-1, 1].
double encode_axis(const AxisSpec& axis, double value);

/// Cartesian product of per-axis samples, first axis slowest.
struct ParamGrid {
    std::vector<AxisSpec> axes;
    std::vector<std::vector<double>> samples;
    std::vector<std::vector<double>> tuples;
    std::vector<int> forced; // tuple indices always in train
    std::vector<int> train;  // ascending
    std::vector<int> test;   // ascending
    std::vector<int> monitor;

    static ParamGrid build(std::vector<AxisSpec> axes);

    int size() const { return static_cast<int>(tuples.size()); }
    int dim() const { return static_cast<int>(axes.size()); }
    std::vector<double> encode(const std::vector<double>& tuple) const;
};

/// Forced tuples: all 2^P corners; single-axis grids also force the second and
/// penultimate samples.
std::vector<int> forced_tuples(const ParamGrid& grid);

/// Fills train/test/monitor. |train| = round(fraction * size) (at least the
/// forced tuples), monitor = min(monitor_size, |test|) tuples drawn from test.
void split_train_test(ParamGrid& grid, std::uint64_t seed, double train_fraction = 0.7, int monitor_size = 10);

} // namespace rfem
