#pragma once

// Generated by tests/oracles/derive_values.py (scipy), then frozen.

namespace frozen {

inline constexpr double kPiSquared = 9.869604401089358;
inline constexpr double kBesselDisk = 5.783185962946783;
inline constexpr double kShootingP15 = 5.318718076379073;
inline constexpr double kShootingP3 = 28.28876197600968;
inline constexpr double kShootingP4 = 73.05681827561733;
inline constexpr double kPiPP15 = 5.318718076379171;
inline constexpr double kPiPP3 = 28.28876197600255;
inline constexpr double kSecondDifference100 = 9.868792685369797;
inline constexpr double kP1Interval20 = 9.910333851392785;
inline constexpr double kStraightTubeGapL10 = 0.024674011002723394;

}  // namespace frozen
