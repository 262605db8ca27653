#include "uavsim/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavsim::baselines {

SectorAssignment SectorAssignment::vertical_strips(int grid_h, int num_uavs) {
    SectorAssignment out;
    out.visit_order.resize(static_cast<size_t>(num_uavs));
    for (int n = 0; n < num_uavs; ++n) {
        const int col_begin = n * grid_h / num_uavs;
        const int col_end = (n + 1) * grid_h / num_uavs;
        auto& order = out.visit_order[static_cast<size_t>(n)];
        bool upward = true;
        for (int col = col_begin; col < col_end; ++col) {
            if (upward)
                for (int row = 0; row < grid_h; ++row) order.push_back(row * grid_h + col);
            else
                for (int row = grid_h - 1; row >= 0; --row) order.push_back(row * grid_h + col);
            upward = !upward;
        }
    }
    return out;
}

bool SectorAssignment::in_sector(int uav, int cell) const {
    const auto& order = visit_order[static_cast<size_t>(uav)];
    return std::find(order.begin(), order.end(), cell) != order.end();
}

HertPolicy::HertPolicy(const SectorAssignment& assignment, int grid_h)
    : assignment_(assignment), grid_h_(grid_h) {}

void HertPolicy::begin_episode() {
    progress_.assign(assignment_.visit_order.size(), 0);
}

int HertPolicy::decide(const world::DecisionContext& ctx) {
    const auto& order = assignment_.visit_order[static_cast<size_t>(ctx.agent)];
    size_t& prog = progress_[static_cast<size_t>(ctx.agent)];

    // Collect before moving on, but only inside the own sector.
    const float here = ctx.obs->window_demand[4]; // window center = current cell
    if (here > 0.0f && assignment_.in_sector(ctx.agent, ctx.cell)) {
        if (!ctx.mask[world::kHover]) return world::kReturnHome; // energy safety triggered
        return world::kHover;
    }

    while (prog < order.size() && order[prog] == ctx.cell) ++prog;
    if (prog >= order.size()) return world::kReturnHome;

    const int target = order[prog];
    const int col = ctx.cell % grid_h_, row = ctx.cell / grid_h_;
    const int tcol = target % grid_h_, trow = target / grid_h_;
    int move;
    if (tcol > col)
        move = world::kRight;
    else if (tcol < col)
        move = world::kLeft;
    else if (trow > row)
        move = world::kForward;
    else if (trow < row)
        move = world::kBackward;
    else
        throw std::logic_error("hert: target equals current cell");
    if (!ctx.mask[static_cast<size_t>(move)]) return world::kReturnHome;
    return move;
}

} // namespace uavsim::baselines
