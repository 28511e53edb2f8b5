#pragma once

#include <vector>

#include "vlaw/env/env.hpp"

namespace vlaw::env {

// Clip-level interaction annotation. outcome_success is meaningful only when
// interaction is true.
struct EventAnnotation {
    bool interaction = false;
    bool outcome_success = false;
};

// Contact between two consecutive observation frames, per family rules. Works
// on recorded and model-predicted frames alike.
bool contact_between(Family family, const Obs& prev, const Obs& cur);

// Annotates the clip covering steps [clip_start, clip_start + clip_len), i.e.
// frames clip_start .. clip_start + clip_len of the sequence.
// interaction: any contact step inside the clip. outcome: the family
// micro-predicate between the clip's first and last frame:
//   stack2d  block A moved >= 0.02 closer to block B
//   wipe2d   >= 1 mark newly erased
//   book2d   hinge angle increased >= 0.2 rad
//   scoop2d  >= 1 particle newly carried or deposited
//   draw2d   >= 2 new waypoints visited
EventAnnotation annotate_events(Family family, const std::vector<Obs>& obs, int clip_start,
                                int clip_len);

}  // namespace vlaw::env
