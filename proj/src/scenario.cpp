#include "uavsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "uavsim/util.hpp"

namespace uavsim {

void GridSpec::validate() const {
    if (cells_per_side < 2) throw ConfigError("grid: cells_per_side must be >= 2");
    if (cell_size_m <= 0.0) throw ConfigError("grid: cell_size_m must be > 0");
    if (altitude_m <= 0.0) throw ConfigError("grid: altitude_m must be > 0");
    if (dense_ratio < 0.0 || dense_ratio > 1.0) throw ConfigError("grid: dense_ratio out of [0,1]");
    if (data_density < 0.0 || data_density > 1.0) throw ConfigError("grid: data_density out of [0,1]");
    if (data_min_bits > data_max_bits) throw ConfigError("grid: data size range inverted");
    if (data_min_bits < 0.0) throw ConfigError("grid: data sizes must be >= 0");
}

double Scenario::total_demand_bits() const {
    return std::accumulate(cell_demand_bits.begin(), cell_demand_bits.end(), 0.0);
}

Scenario generate_scenario(const GridSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    const int n_cells = spec.cell_count();

    // Dense/sparse split: a fixed-size uniformly chosen subset of cells.
    std::vector<int> order(static_cast<size_t>(n_cells));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int n_dense = static_cast<int>(std::lround(spec.dense_ratio * n_cells));
    std::vector<char> is_dense(static_cast<size_t>(n_cells), 0);
    for (int k = 0; k < n_dense; ++k) is_dense[static_cast<size_t>(order[static_cast<size_t>(k)])] = 1;

    // SN placement, uniform inside each cell.
    Scenario out;
    out.cell_demand_bits.assign(static_cast<size_t>(n_cells), 0.0);
    std::uniform_real_distribution<double> in_cell(0.0, spec.cell_size_m);
    for (int c = 0; c < n_cells; ++c) {
        const double lambda = is_dense[static_cast<size_t>(c)] ? spec.lambda_dense : spec.lambda_sparse;
        std::poisson_distribution<int> count(lambda);
        const int n_sn = count(rng);
        const double x0 = spec.cell_col(c) * spec.cell_size_m;
        const double y0 = spec.cell_row(c) * spec.cell_size_m;
        for (int k = 0; k < n_sn; ++k) {
            SensorNode sn;
            sn.id = static_cast<int>(out.nodes.size());
            sn.cell = c;
            sn.x = x0 + in_cell(rng);
            sn.y = y0 + in_cell(rng);
            out.nodes.push_back(sn);
        }
    }

    // Active cells: Poisson(phi*H^2) capped at H^2, locations uniform.
    std::poisson_distribution<int> active_count_dist(spec.data_density * n_cells);
    const int n_active = std::min(active_count_dist(rng), n_cells);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> active(static_cast<size_t>(n_cells), 0);
    for (int k = 0; k < n_active; ++k) active[static_cast<size_t>(order[static_cast<size_t>(k)])] = 1;

    std::uniform_real_distribution<double> demand(spec.data_min_bits, spec.data_max_bits);
    for (auto& sn : out.nodes) {
        if (!active[static_cast<size_t>(sn.cell)]) continue;
        sn.demand_bits = demand(rng);
        out.cell_demand_bits[static_cast<size_t>(sn.cell)] += sn.demand_bits;
    }
    return out;
}

std::string serialize_scenario(const GridSpec& spec, const Scenario& s) {
    std::string out;
    out += "# uavsim scenario v1\n";
    out += "grid " + std::to_string(spec.cells_per_side) + " " + format_double(spec.cell_size_m) + "\n";
    out += "sns " + std::to_string(s.nodes.size()) + "\n";
    for (const auto& sn : s.nodes) {
        out += "sn " + std::to_string(sn.cell) + " " + format_double(sn.x) + " " +
               format_double(sn.y) + " " + format_double(sn.demand_bits) + "\n";
    }
    return out;
}

Scenario parse_scenario(const GridSpec& spec, std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "# uavsim scenario v1")
        throw std::runtime_error("scenario: bad or missing version header");

    Scenario out;
    out.cell_demand_bits.assign(static_cast<size_t>(spec.cell_count()), 0.0);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "grid") {
            int h = 0;
            double cell = 0;
            ls >> h >> cell;
            if (h != spec.cells_per_side)
                throw std::runtime_error("scenario: grid size mismatch");
        } else if (tag == "sns") {
            size_t n = 0;
            ls >> n;
            out.nodes.reserve(n);
        } else if (tag == "sn") {
            SensorNode sn;
            ls >> sn.cell >> sn.x >> sn.y >> sn.demand_bits;
            if (ls.fail() || sn.cell < 0 || sn.cell >= spec.cell_count())
                throw std::runtime_error("scenario: malformed sn record");
            sn.id = static_cast<int>(out.nodes.size());
            out.nodes.push_back(sn);
            out.cell_demand_bits[static_cast<size_t>(sn.cell)] += sn.demand_bits;
        } else {
            throw std::runtime_error("scenario: unknown record '" + tag + "'");
        }
    }
    return out;
}

} // namespace uavsim
