#pragma once

#include "mves/types.hpp"

namespace mves {

// Stored-energy walk across a service window. Result has one entry per
// window slot, inclusive of the flow at that slot; soc_start is the level
// just before the first window slot. Under the physical convention a
// positive (discharge) flow lowers the level.
Vec soc_trajectory(const SystemConfig& c, const Eigen::Ref<const Vec>& flows,
                   const ServiceWindow& w, double soc_start);

// All constraint checks for one day: both balances, every flow bound, the
// gas split, per-device window net flow and SOC corridor. Bounds get the
// same relative tolerance slack as the balances, so the violation set can
// only shrink as tol grows. Listing order is fixed: per-slot system checks
// in slot order, then each storage fleet device by device.
std::vector<Violation> check_feasibility(const SystemConfig& c, const DayProfile& forecast,
                                         const Schedule& s, double tol = 1e-6);

}  // namespace mves
