#pragma once

#include <vector>

#include "mves/costs.hpp"
#include "mves/network.hpp"
#include "mves/types.hpp"

namespace mves {

// Raw network output, channel blocks of T: [S_E | S_G | v_CHP | EV 0..K-1 | TES 0..K-1].
int raw_width(const SystemConfig& c);

// Intermediates retained for the reverse pass.
struct EnforceCache {
  Vec sig_e, sig_g, sig_v;      // logistic outputs per slot
  std::vector<int> gas_branch;  // 0 = squashed import, 1 = chp cap, 2 = boiler cap
  Mat ev_tanh, tes_tanh;        // squashed storage channels, device x slot
  Mat ev_mid, tes_mid;          // flows after mean removal, before the uniform rescale
  std::vector<double> ev_scale, tes_scale;
  std::vector<int> ev_peak, tes_peak;  // slot whose exceedance set the scale, -1 if none
};

// Maps an unconstrained vector onto a schedule that meets every bound except
// the storage corridors, which the training penalty owns. Steps: squash and
// scale the import/dispatch channels; cap gas so both converter routes stay
// within range; squash storage flows into their efficiency-weighted range;
// zero them outside the service window; remove the window mean; uniformly
// shrink any series the mean removal pushed past a bound. Ties in the gas cap
// and the exceedance scan resolve to the first candidate.
Schedule enforce_constraints(const SystemConfig& c, const Vec& raw, EnforceCache* cache = nullptr);

// d(loss)/d(raw) from d(loss)/d(schedule); needs the cache of the matching
// forward call.
Vec enforce_backward(const SystemConfig& c, const EnforceCache& cache, const ScheduleGrad& g);

Schedule neural_schedule(const NetworkParams& p, const SystemConfig& c, const DayProfile& f);

}  // namespace mves
