#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace pwave {

enum class ProfileFamily { Zero, Constant, Bump, Decaying, Plateau };

/// Scalar function of arclength drawn from a closed set of analytic families.
///
///   zero                 0
///   constant             A
///   bump                 A exp(1 - 1/(1 - x^2)),  x = (s - c)/w, |x| < 1
///   decaying             A / (1 + x^2),           x = (s - c)/w
///   plateau              A on |s - c| <= w, smooth C-infinity taper to 0 over
///                        a ramp of length r on each side
///
/// Every family except `constant` and `decaying` is compactly supported. All
/// families are even about `center` and nonincreasing in |s - center|, which
/// makes sup-norms over tails exact.
class Profile {
 public:
  Profile() = default;

  static Profile zero();
  static Profile constant(double amplitude);
  static Profile bump(double amplitude, double center, double width);
  static Profile decaying(double amplitude, double center = 0.0, double width = 1.0);
  static Profile plateau(double amplitude, double center, double width, double ramp);

  /// Parses "family key=value ..." (e.g. "bump amplitude=0.5 width=2").
  static Profile parse(std::string_view text);

  ProfileFamily family() const { return family_; }
  double amplitude() const { return amplitude_; }
  double center() const { return center_; }
  double width() const { return width_; }
  double ramp() const { return ramp_; }

  double value(double s) const;

  /// Integral of the profile over [0, s].
  double antiderivative(double s) const;

  /// Exact sup over the real line.
  double sup_norm() const;

  /// Exact sup over |s| > l.
  double tail_sup_norm(double l) const;

  /// Closed support interval, or nullopt for families supported everywhere.
  /// The zero profile reports an empty interval (lo > hi).
  std::optional<std::pair<double, double>> support() const;

  bool is_zero() const { return family_ == ProfileFamily::Zero || amplitude_ == 0.0; }

  /// True when value(s) -> 0 as |s| -> infinity.
  bool decays() const;

  std::string describe() const;

 private:
  /// Shape with unit amplitude at distance r = |s - center| from the center.
  double shape(double r) const;

  ProfileFamily family_ = ProfileFamily::Zero;
  double amplitude_ = 0.0;
  double center_ = 0.0;
  double width_ = 1.0;
  double ramp_ = 1.0;
};

/// Integral of a(s) b(s) over the real line; at least one factor must be
/// compactly supported.
double integrate_product(const Profile& a, const Profile& b);

/// Smooth step: 0 for x <= 0, 1 for x >= 1, C-infinity in between.
double smooth_step(double x);

}  // namespace pwave
