#pragma once

// Parameter set for the planar 6-DoF biped.
//
// Six moving links (stance shank/thigh, swing thigh/shank/foot, torso) plus
// the static stance foot, pinned at the stance ankle. Generalized
// coordinates:
//   q1  stance shank absolute angle (ankle -> knee direction)
//   q2  stance knee flexion, thigh absolute = q1 + q2   (limit q2 >= 0)
//   q3  swing thigh absolute angle (hip -> knee direction, hangs near -pi/2)
//   q4  swing knee flexion, shank absolute = q3 + q4    (limit q4 <= 0)
//   q5  swing sole absolute angle (0 = flat)
//   q6  torso absolute angle (pi/2 = upright)
// All angles from the +x axis, counterclockwise. The world origin is the
// ground projection of the stance ankle; the ankle pin sits at
// (0, ankle_height).

#include <iosfwd>
#include <string>

namespace slipstep::biped {

struct LinkParams {
    double mass = 0.0;     // [kg]
    double length = 0.0;   // proximal -> distal joint distance [m]
    double com = 0.0;      // CoM distance from the proximal joint [m]
    double inertia = 0.0;  // about the CoM [kg m^2]
};

struct BipedModel {
    double g = 9.8;
    double ankle_height = 0.0;   // ankle pin above the sole plane [m]
    double sole_fore = 0.0;      // support sole ahead of the ankle [m]
    double sole_aft = 0.0;       // and behind it [m]
    LinkParams shank;            // one of two identical shanks
    LinkParams thigh;            // one of two identical thighs
    LinkParams torso;
    double foot_mass = 0.0;
    double foot_com_drop = 0.0;  // foot CoM below the ankle when flat [m]
    double foot_inertia = 0.0;

    double total_mass() const {
        return torso.mass + 2.0 * (thigh.mass + shank.mass + foot_mass);
    }
    double leg_length() const { return shank.length + thigh.length; }
};

// Throws std::invalid_argument naming the offending field.
void validate_model(const BipedModel& m);

// key = value text, '#' comments. Keys: g, ankle_height, sole_fore,
// sole_aft, foot_mass, foot_com_drop, foot_inertia and
// {shank,thigh,torso}_{mass,length,com,inertia}.
BipedModel parse_model(std::istream& in);
BipedModel load_model(const std::string& path);

// Built-in small-humanoid parameter set (5 kg, 0.2 m legs); the same
// numbers ship as configs/nao_like.model for file-based runs.
BipedModel reference_model();

} // namespace slipstep::biped
