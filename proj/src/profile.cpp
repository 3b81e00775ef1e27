#include "pwave/profile.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

double integrate_smooth(const auto& fn, double a, double b) {
  if (a == b) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(fn, a, b, 12, 1e-14);
}

// Integrates fn over [a, b], splitting at the given breakpoints.
double integrate_split(const auto& fn, double a, double b, std::vector<double> breaks) {
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) total += integrate_smooth(fn, lo, hi);
  }
  return sign * total;
}

std::vector<double> breakpoints(const Profile& p) {
  const double c = p.center();
  switch (p.family()) {
    case ProfileFamily::Bump:
      return {c - p.width(), c, c + p.width()};
    case ProfileFamily::Plateau:
      return {c - p.width() - p.ramp(), c - p.width(), c, c + p.width(), c + p.width() + p.ramp()};
    default:
      return {c};
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

Profile Profile::zero() { return Profile{}; }

Profile Profile::constant(double amplitude) {
  Profile p;
  p.family_ = ProfileFamily::Constant;
  p.amplitude_ = amplitude;
  return p;
}

Profile Profile::bump(double amplitude, double center, double width) {
  require(width > 0.0, "bump profile needs width > 0");
  Profile p;
  p.family_ = ProfileFamily::Bump;
  p.amplitude_ = amplitude;
  p.center_ = center;
  p.width_ = width;
  return p;
}

Profile Profile::decaying(double amplitude, double center, double width) {
  require(width > 0.0, "decaying profile needs width > 0");
  Profile p;
  p.family_ = ProfileFamily::Decaying;
  p.amplitude_ = amplitude;
  p.center_ = center;
  p.width_ = width;
  return p;
}

Profile Profile::plateau(double amplitude, double center, double width, double ramp) {
  require(width >= 0.0, "plateau profile needs width >= 0");
  require(ramp > 0.0, "plateau profile needs ramp > 0");
  Profile p;
  p.family_ = ProfileFamily::Plateau;
  p.amplitude_ = amplitude;
  p.center_ = center;
  p.width_ = width;
  p.ramp_ = ramp;
  return p;
}

Profile Profile::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string family;
  in >> family;
  std::map<std::string, double> params;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    require(eq != std::string::npos, "profile parameter '" + token + "' is not key=value");
    const std::string key = token.substr(0, eq);
    try {
      params[key] = std::stod(token.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("profile parameter '" + key + "' is not a number");
    }
  }
  auto take = [&](const std::string& key, std::optional<double> fallback) {
    auto it = params.find(key);
    if (it == params.end()) {
      require(fallback.has_value(), "profile '" + family + "' requires parameter '" + key + "'");
      return *fallback;
    }
    const double v = it->second;
    params.erase(it);
    return v;
  };
  Profile p;
  if (family == "zero") {
    p = zero();
  } else if (family == "constant") {
    p = constant(take("amplitude", std::nullopt));
  } else if (family == "bump") {
    const double a = take("amplitude", std::nullopt);
    const double c = take("center", 0.0);
    p = bump(a, c, take("width", std::nullopt));
  } else if (family == "decaying") {
    const double a = take("amplitude", std::nullopt);
    const double c = take("center", 0.0);
    p = decaying(a, c, take("width", 1.0));
  } else if (family == "plateau") {
    const double a = take("amplitude", std::nullopt);
    const double c = take("center", 0.0);
    const double w = take("width", std::nullopt);
    p = plateau(a, c, w, take("ramp", std::nullopt));
  } else {
    throw InputError("unknown profile family '" + family +
                     "' (expected zero, constant, bump, decaying, plateau)");
  }
  if (!params.empty()) {
    throw InputError("profile '" + family + "' has unknown parameter '" + params.begin()->first + "'");
  }
  return p;
}

double Profile::shape(double r) const {
  switch (family_) {
    case ProfileFamily::Zero:
      return 0.0;
    case ProfileFamily::Constant:
      return 1.0;
    case ProfileFamily::Bump: {
      const double x = r / width_;
      if (x >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - x * x));
    }
    case ProfileFamily::Decaying: {
      const double x = r / width_;
      return 1.0 / (1.0 + x * x);
    }
    case ProfileFamily::Plateau:
      return smooth_step((width_ + ramp_ - r) / ramp_);
  }
  return 0.0;
}

double Profile::value(double s) const {
  if (family_ == ProfileFamily::Zero) return 0.0;
  return amplitude_ * shape(std::abs(s - center_));
}

double Profile::antiderivative(double s) const {
  switch (family_) {
    case ProfileFamily::Zero:
      return 0.0;
    case ProfileFamily::Constant:
      return amplitude_ * s;
    case ProfileFamily::Decaying:
      return amplitude_ * width_ *
             (std::atan((s - center_) / width_) - std::atan(-center_ / width_));
    case ProfileFamily::Bump:
    case ProfileFamily::Plateau: {
      auto fn = [this](double x) { return value(x); };
      const auto [lo, hi] = *support();
      const double a = std::clamp(0.0, lo, hi);
      const double b = std::clamp(s, lo, hi);
      return integrate_split(fn, a, b, breakpoints(*this));
    }
  }
  return 0.0;
}

double Profile::sup_norm() const {
  if (family_ == ProfileFamily::Zero) return 0.0;
  return std::abs(amplitude_);
}

double Profile::tail_sup_norm(double l) const {
  if (family_ == ProfileFamily::Zero) return 0.0;
  if (family_ == ProfileFamily::Constant) return std::abs(amplitude_);
  // Shape is nonincreasing in |s - c|: the tail point nearest the center wins.
  if (std::abs(center_) >= l) return std::abs(amplitude_);
  return std::abs(amplitude_) * shape(l - std::abs(center_));
}

std::optional<std::pair<double, double>> Profile::support() const {
  switch (family_) {
    case ProfileFamily::Zero:
      return std::pair{0.0, -1.0};
    case ProfileFamily::Bump:
      return std::pair{center_ - width_, center_ + width_};
    case ProfileFamily::Plateau:
      return std::pair{center_ - width_ - ramp_, center_ + width_ + ramp_};
    default:
      if (amplitude_ == 0.0) return std::pair{0.0, -1.0};
      return std::nullopt;
  }
}

bool Profile::decays() const { return family_ != ProfileFamily::Constant || amplitude_ == 0.0; }

std::string Profile::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (family_) {
    case ProfileFamily::Zero:
      out << "zero";
      break;
    case ProfileFamily::Constant:
      out << "constant amplitude=" << amplitude_;
      break;
    case ProfileFamily::Bump:
      out << "bump amplitude=" << amplitude_ << " center=" << center_ << " width=" << width_;
      break;
    case ProfileFamily::Decaying:
      out << "decaying amplitude=" << amplitude_ << " center=" << center_ << " width=" << width_;
      break;
    case ProfileFamily::Plateau:
      out << "plateau amplitude=" << amplitude_ << " center=" << center_ << " width=" << width_
          << " ramp=" << ramp_;
      break;
  }
  return out.str();
}

double integrate_product(const Profile& a, const Profile& b) {
  auto sa = a.support();
  auto sb = b.support();
  if (!sa && !sb) {
    throw InputError("integrate_product needs at least one compactly supported profile");
  }
  double lo = -INFINITY, hi = INFINITY;
  if (sa) {
    lo = std::max(lo, sa->first);
    hi = std::min(hi, sa->second);
  }
  if (sb) {
    lo = std::max(lo, sb->first);
    hi = std::min(hi, sb->second);
  }
  if (!(hi > lo)) return 0.0;
  auto breaks = breakpoints(a);
  const auto more = breakpoints(b);
  breaks.insert(breaks.end(), more.begin(), more.end());
  auto fn = [&](double s) { return a.value(s) * b.value(s); };
  return integrate_split(fn, lo, hi, breaks);
}

}  // namespace pwave
