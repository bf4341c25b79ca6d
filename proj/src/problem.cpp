#include "rfem/problem.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "rfem/errors.hpp"

#ifndef RFEM_DATA_DIR
#define RFEM_DATA_DIR "data"
#endif

namespace rfem {

std::string to_string(Family f)
{
    switch (f) {
    case Family::Arctan1D:
        return "arctan1d";
    case Family::Power:
        return "power";
    case Family::TwoMaterial:
        return "two_material";
    case Family::Arctan2D:
        return "arctan2d";
    case Family::LShape:
        return "lshape";
    case Family::Constant1D:
        return "constant1d";
    }
    return "unknown";
}

Family family_from_string(const std::string& s)
{
    for (auto f : {Family::Arctan1D, Family::Power, Family::TwoMaterial, Family::Arctan2D, Family::LShape,
                   Family::Constant1D})
        if (to_string(f) == s)
            return f;
    throw ConfigError("unknown problem family '" + s + "'");
}

std::string to_string(BoundarySpec b)
{
    switch (b) {
    case BoundarySpec::Left1D:
        return "left";
    case BoundarySpec::Both1D:
        return "both";
    case BoundarySpec::LeftBottom2D:
        return "left_bottom";
    case BoundarySpec::All2D:
        return "all";
    case BoundarySpec::LShape2D:
        return "lshape";
    }
    return "unknown";
}

BoundarySpec boundary_from_string(const std::string& s)
{
    for (auto b : {BoundarySpec::Left1D, BoundarySpec::Both1D, BoundarySpec::LeftBottom2D, BoundarySpec::All2D,
                   BoundarySpec::LShape2D})
        if (to_string(b) == s)
            return b;
    throw ConfigError("unknown boundary specification '" + s + "'");
}

std::string to_string(ReferenceSource r)
{
    switch (r) {
    case ReferenceSource::Analytic:
        return "analytic";
    case ReferenceSource::Quadrature:
        return "quadrature";
    case ReferenceSource::Table:
        return "table";
    case ReferenceSource::None:
        return "none";
    }
    return "unknown";
}

double MaterialField::at(double x, double y) const
{
    for (const Region& r : regions)
        if (x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1)
            return r.value;
    return default_value;
}

void MaterialField::validate() const
{
    if (!(default_value > 0.0))
        throw ConfigError("material default value must be positive");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const Region& r = regions[i];
        if (!(r.value > 0.0))
            throw ConfigError("material values must be positive");
        if (!(r.x0 < r.x1) || !(r.y0 < r.y1))
            throw ConfigError("material region bounds must be increasing");
        for (std::size_t j = 0; j < i; ++j) {
            const Region& o = regions[j];
            const bool overlap = r.x0 < o.x1 && o.x0 < r.x1 && r.y0 < o.y1 && o.y0 < r.y1;
            if (overlap)
                throw ConfigError("material regions overlap");
        }
    }
}

int parameter_count(Family f)
{
    switch (f) {
    case Family::Arctan1D:
    case Family::LShape:
    case Family::Constant1D:
        return 2;
    case Family::Power:
    case Family::TwoMaterial:
        return 1;
    case Family::Arctan2D:
        return 3;
    }
    return 0;
}

std::vector<double> default_parameters(Family f)
{
    switch (f) {
    case Family::Arctan1D:
        return {10.0, 0.5};
    case Family::Power:
        return {0.7};
    case Family::TwoMaterial:
        return {10.0};
    case Family::Arctan2D:
        return {10.0, 0.05, 0.05};
    case Family::LShape:
        return {1.0, 1.0};
    case Family::Constant1D:
        return {1.0, 0.0};
    }
    return {};
}

ProblemSpec make_problem(Family f, std::vector<double> sigma, int elements)
{
    if (static_cast<int>(sigma.size()) != parameter_count(f))
        throw ConfigError(to_string(f) + " expects " + std::to_string(parameter_count(f)) + " parameters");

    ProblemSpec p;
    p.family = f;
    p.sigma = sigma;
    p.elements = elements;
    switch (f) {
    case Family::Arctan1D: {
        const double a = sigma[0];
        const double s = sigma[1];
        p.load.family = ForcingFamily::Arctan1D;
        p.load.alpha = a;
        p.load.s = s;
        p.neumann_g = a / (1.0 + a * a * (1.0 - s) * (1.0 - s));
        break;
    }
    case Family::Power:
        p.load.family = ForcingFamily::Power;
        p.load.sigma = sigma[0];
        p.neumann_g = sigma[0];
        break;
    case Family::TwoMaterial:
        p.boundary = BoundarySpec::Both1D;
        p.load.family = ForcingFamily::SineMaterial;
        p.material.regions = {Region{0.5, 1.0, 0.0, 1.0, sigma[0]}};
        p.fixed_x = {0.5};
        break;
    case Family::Arctan2D:
        p.dim = 2;
        p.boundary = BoundarySpec::LeftBottom2D;
        p.load.family = ForcingFamily::Arctan2D;
        p.load.alpha = sigma[0];
        p.load.s1 = sigma[1];
        p.load.s2 = sigma[2];
        p.load.mode = IntegrationMode::Quadrature;
        p.load.order = 50;
        p.reference = ReferenceSource::Quadrature;
        break;
    case Family::LShape:
        p.dim = 2;
        p.boundary = BoundarySpec::LShape2D;
        p.load.family = ForcingFamily::Constant;
        p.load.value = 1.0;
        p.material.regions = {Region{0.0, 0.5, 0.0, 0.5, sigma[0]}, Region{0.5, 1.0, 0.5, 1.0, sigma[1]}};
        p.fixed_x = {0.5};
        p.fixed_y = {0.5};
        p.reference = ReferenceSource::Table;
        break;
    case Family::Constant1D:
        p.load.family = ForcingFamily::Constant;
        p.load.value = sigma[0];
        p.neumann_g = sigma[1];
        break;
    }
    p.validate();
    return p;
}

void ProblemSpec::validate() const
{
    if (dim != 1 && dim != 2)
        throw ConfigError("dimension must be 1 or 2");
    if (static_cast<int>(sigma.size()) != parameter_count(family))
        throw ConfigError("parameter tuple has the wrong length for " + to_string(family));
    if (elements < 1)
        throw ConfigError("need at least one element per axis");
    if (adaptive_x() < 1 || (dim == 2 && adaptive_y() < 1))
        throw ConfigError("need at least one adaptive interval per axis");
    const bool two_d_family = family == Family::Arctan2D || family == Family::LShape;
    if ((dim == 2) != two_d_family)
        throw ConfigError("dimension does not match family " + to_string(family));
    const bool bc_2d = boundary == BoundarySpec::LeftBottom2D || boundary == BoundarySpec::All2D
                       || boundary == BoundarySpec::LShape2D;
    if (bc_2d != (dim == 2))
        throw ConfigError("boundary specification does not match the dimension");
    material.validate();
    load.validate();
    if (family == Family::Power && load.mode != IntegrationMode::Exact)
        throw ConfigError("power family requires exact integration");
    auto has_half = [](const std::vector<double>& v) {
        for (double x : v)
            if (std::abs(x - 0.5) < 1e-14)
                return true;
        return false;
    };
    if (family == Family::TwoMaterial && !has_half(fixed_x))
        throw ConfigError("two-material problem requires the fixed node 0.5");
    if (family == Family::LShape && (!has_half(fixed_x) || !has_half(fixed_y)))
        throw ConfigError("L-shape problem requires fixed lines x = 0.5 and y = 0.5");
    if (family == Family::LShape && boundary != BoundarySpec::LShape2D)
        throw ConfigError("L-shape problem requires the L-shape boundary mask");
}

std::vector<ProblemSpec> registry()
{
    std::vector<ProblemSpec> out;
    for (Family f : {Family::Arctan1D, Family::Power, Family::TwoMaterial, Family::Arctan2D, Family::LShape})
        out.push_back(make_problem(f, 32));
    return out;
}

MeshParams1D axis_params(const ProblemSpec& p, int axis, std::vector<double> theta)
{
    MeshParams1D m;
    m.theta = std::move(theta);
    m.fixed_interior = axis == 0 ? p.fixed_x : p.fixed_y;
    m.interval = axis == 0 ? p.domain_x : p.domain_y;
    return m;
}

// --- reference energies -------------------------------------------------------

std::vector<ReferenceEntry> read_reference_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open reference table " + path);
    std::string line;
    std::getline(in, line);
    if (line != "sigma1,sigma2,J_exact")
        throw ConfigError(path + ": expected header 'sigma1,sigma2,J_exact'");
    std::vector<ReferenceEntry> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        ReferenceEntry e{};
        char c1 = 0, c2 = 0;
        if (!(ss >> e.sigma1 >> c1 >> e.sigma2 >> c2 >> e.J) || c1 != ',' || c2 != ',')
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        rows.push_back(e);
    }
    return rows;
}

void write_reference_table(const std::string& path, const std::vector<ReferenceEntry>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path);
    out << "sigma1,sigma2,J_exact\n" << std::setprecision(17);
    for (const auto& r : rows)
        out << r.sigma1 << ',' << r.sigma2 << ',' << r.J << '\n';
}

std::string default_reference_table_path()
{
    if (const char* env = std::getenv("RFEM_LSHAPE_TABLE"))
        return env;
    return std::string(RFEM_DATA_DIR) + "/lshape_reference.csv";
}

std::optional<double> lshape_reference(double sigma1, double sigma2)
{
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    if (close(sigma1, 1.0) && close(sigma2, 1.0))
        return kLShapeReferenceJ;

    static std::mutex mutex;
    static std::map<std::string, std::vector<ReferenceEntry>> cache;
    const std::string path = default_reference_table_path();
    std::lock_guard lock(mutex);
    auto it = cache.find(path);
    if (it == cache.end()) {
        std::vector<ReferenceEntry> rows;
        try {
            rows = read_reference_table(path);
        } catch (const ConfigError&) {
        }
        it = cache.emplace(path, std::move(rows)).first;
    }
    for (const auto& r : it->second)
        if (close(sigma1, r.sigma1) && close(sigma2, r.sigma2))
            return r.J;
    return std::nullopt;
}

double exact_energy(const ProblemSpec& p)
{
    const auto& s = p.sigma;
    switch (p.family) {
    case Family::Arctan1D:
        return sigmoid_gradient_energy(s[0], s[1]);
    case Family::Power:
        return s[0] * s[0] / (2.0 * s[0] - 1.0);
    case Family::TwoMaterial:
        return std::numbers::pi * std::numbers::pi * (1.0 + 1.0 / s[0]);
    case Family::Arctan2D: {
        const double a = s[0];
        return sigmoid_gradient_energy(a, s[1]) * sigmoid_l2_energy(a, s[2])
               + sigmoid_l2_energy(a, s[1]) * sigmoid_gradient_energy(a, s[2]);
    }
    case Family::LShape: {
        if (auto J = lshape_reference(s[0], s[1]))
            return -2.0 * *J;
        throw Unsupported("no L-shape reference energy for sigma = (" + num(s[0]) + ", "
                          + num(s[1]) + ")");
    }
    case Family::Constant1D: {
        const double f = s[0];
        const double g = s[1];
        return f * f / 3.0 + f * g + g * g;
    }
    }
    throw Unsupported("no exact energy for this problem");
}

} // namespace rfem
