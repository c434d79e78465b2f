#pragma once

// Atom-contribution parameter tables, version acv1. Frozen: any change to a
// value here must bump the version string, which is stamped into the
// descriptor catalog and every run manifest.
//
// The logP and polar-surface-area contributions are deterministic estimates
// classed by element, aromaticity and attached hydrogens. They are not
// calibrated reproductions of any published parameterization.

namespace autoqsar::atom_contrib_v1 {

inline constexpr const char* kVersion = "acv1";

struct LogPEntry {
  int element;       // static_cast<int>(Element)
  bool aromatic;
  bool has_h;        // at least one attached hydrogen
  double value;
};

// Element order matches the Element enum: B C N O P S F Cl Br I H.
inline constexpr LogPEntry kLogP[] = {
    {0, false, true, -0.18}, {0, false, false, -0.10},
    {1, false, true, 0.23},  {1, false, false, 0.11},
    {1, true, true, 0.34},   {1, true, false, 0.15},
    {2, false, true, -0.60}, {2, false, false, -0.40},
    {2, true, true, -0.31},  {2, true, false, -0.25},
    {3, false, true, -0.55}, {3, false, false, -0.35},
    {3, true, true, -0.20},  {3, true, false, -0.15},
    {4, false, true, -0.45}, {4, false, false, -0.45},
    {5, false, true, 0.50},  {5, false, false, 0.55},
    {5, true, true, 0.40},   {5, true, false, 0.40},
    {6, false, false, 0.14}, {7, false, false, 0.65},
    {8, false, false, 0.86}, {9, false, false, 1.12},
};

// Added per unit of absolute formal charge.
inline constexpr double kLogPChargePenalty = -0.80;

struct PsaEntry {
  int element;     // N = 2, O = 3 only
  bool aromatic;
  int h_class;     // 0, 1, or 2 (meaning >= 2)
  bool double_bonded;
  double value;
};

inline constexpr PsaEntry kPolarSurface[] = {
    {2, false, 0, false, 3.24},  {2, false, 0, true, 12.36},
    {2, false, 1, false, 12.03}, {2, false, 1, true, 23.85},
    {2, false, 2, false, 26.02}, {2, false, 2, true, 26.02},
    {2, true, 0, false, 12.89},  {2, true, 0, true, 12.89},
    {2, true, 1, false, 15.79},  {2, true, 1, true, 15.79},
    {2, true, 2, false, 15.79},  {2, true, 2, true, 15.79},
    {3, false, 0, false, 9.23},  {3, false, 0, true, 17.07},
    {3, false, 1, false, 20.23}, {3, false, 1, true, 20.23},
    {3, false, 2, false, 20.23}, {3, false, 2, true, 20.23},
    {3, true, 0, false, 13.14},  {3, true, 0, true, 13.14},
    {3, true, 1, false, 13.14},  {3, true, 1, true, 13.14},
    {3, true, 2, false, 13.14},  {3, true, 2, true, 13.14},
};

// Added per unit of absolute formal charge on N or O.
inline constexpr double kPsaChargeBump = 4.0;

}  // namespace autoqsar::atom_contrib_v1
