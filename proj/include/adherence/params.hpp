#pragma once

#include <cstdint>
#include <optional>

namespace adherence {

/// Model constants for one patient (arm), with the derived quantities used
/// throughout: persistence rho = 1 - p - q and the passive-limit belief
/// z_inf = p / (p + q).
///
/// Construction enforces 0 < p < 1, 0 < q < 1, 0 < beta < 1, r > 0,
/// cost >= 0 and 1 - p > q (positive persistence). The derived fields are
/// computed once here; every formula reads them instead of recomputing.
struct PatientParams {
  double p;      ///< lapse probability (adherent -> nonadherent, passive)
  double q;      ///< spontaneous recovery probability (passive)
  double r;      ///< reward per adherent period
  double beta;   ///< discount factor
  double cost;   ///< per-intervention cost (0 = costless)
  double rho;    ///< persistence 1 - p - q, in (0, 1)
  double z_inf;  ///< limit of the passive belief trajectory, p / (p + q)

  PatientParams(double p, double q, double r, double beta, double cost = 0.0);
};

/// Activation threshold in belief space. A finite threshold z in [0, 1]
/// activates exactly when the belief x satisfies x > z. The two sentinels
/// behave like z < 0 (always active) and z >= 1 (always passive).
class Threshold {
 public:
  enum class Kind : std::uint8_t { AlwaysActive, Finite, AlwaysPassive };

  static Threshold always_active() { return Threshold(Kind::AlwaysActive, -1.0); }
  static Threshold always_passive() { return Threshold(Kind::AlwaysPassive, 2.0); }
  /// Finite threshold; throws std::invalid_argument unless z is in [0, 1].
  static Threshold finite(double z);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  /// Finite value; only meaningful when is_finite().
  double value() const { return z_; }

  /// Action taken by the z-threshold policy at belief x.
  bool active_at(double x) const {
    switch (kind_) {
      case Kind::AlwaysActive: return true;
      case Kind::AlwaysPassive: return false;
      default: return x > z_;
    }
  }

 private:
  Threshold(Kind kind, double z) : kind_(kind), z_(z) {}
  Kind kind_;
  double z_;
};

/// First threshold-crossing time of the passive trajectory; disengaged when
/// the trajectory never exceeds the threshold (z >= z_inf with x <= z).
/// Callers must branch on presence.
using CrossingTime = std::optional<std::int64_t>;

}  // namespace adherence
