#pragma once

#include <vector>

#include "uavsim/world.hpp"

namespace uavsim::baselines {

// Vertical-strip partition of the grid with a boustrophedon visiting order
// per strip.  Strips are near-equal column ranges assigned left-to-right by
// UAV id; visiting order covers every strip cell exactly once.
struct SectorAssignment {
    std::vector<std::vector<int>> visit_order; // per UAV, cells in sweep order

    static SectorAssignment vertical_strips(int grid_h, int num_uavs);
    bool in_sector(int uav, int cell) const;
};

// Scripted sector-sweep baseline: walk the assigned strip cell by cell,
// hover whenever the current strip cell still has demand, return home when
// the strip is done or the desired action is no longer energy-safe.
class HertPolicy : public world::Policy {
  public:
    HertPolicy(const SectorAssignment& assignment, int grid_h);

    void begin_episode() override;
    int decide(const world::DecisionContext& ctx) override;

  private:
    const SectorAssignment& assignment_;
    int grid_h_;
    std::vector<size_t> progress_; // per agent: next unvisited index in visit_order
};

} // namespace uavsim::baselines
