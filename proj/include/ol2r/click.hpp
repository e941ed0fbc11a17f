#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ol2r/dataset.hpp"
#include "ol2r/rng.hpp"

namespace ol2r {

/// Results lists are truncated to the top 10 positions for display.
constexpr int kDisplayDepth = 10;

/// Dependent click model profile: click and stop probabilities indexed by
/// relevance grade.
struct ClickProfile {
  std::string name;
  std::array<double, 5> click_prob{};
  std::array<double, 5> stop_prob{};

  static ClickProfile perfect();
  static ClickProfile navigational();
  static ClickProfile informational();
  /// Accepts "perfect", "navigational", "informational" (throws otherwise).
  static ClickProfile by_name(std::string_view name);
  /// Ten probabilities: five click then five stop.
  static ClickProfile custom(std::span<const double> probs);
};

/// One simulated user visit over a displayed list.
struct Interaction {
  std::vector<int> displayed;   // doc indices in served order, <= kDisplayDepth
  std::vector<char> clicks;     // 0/1 per displayed position
  int last_examined = 0;        // 1-based display position; 0 when nothing shown

  bool any_click() const;
  int last_click_position() const;  // 1-based; 0 when no clicks
};

/// One inferred pairwise preference: document i clicked, document j
/// examined but not clicked, label y = 1 meaning i preferred over j.
struct PairObservation {
  int round = 0;
  std::vector<double> features_i;
  std::vector<double> features_j;
  double label = 1.0;
};

/// y_ij = (c_i - c_j + 1) / 2; antisymmetric in (i, j).
inline double pair_label(int click_i, int click_j) {
  return (click_i - click_j + 1) / 2.0;
}

/// Scans the displayed list top-down. At each position a click is drawn
/// from click_prob[grade]; after a click, stop_prob[grade] decides whether
/// scanning terminates there. Consumes one draw per examination plus one
/// per click.
Interaction simulate_clicks(const Query& q, std::span<const int> displayed,
                            const ClickProfile& profile, RandomStream& rng);

/// Learner-side pair extraction. The examined prefix is positions
/// 1 .. (last click + lookahead), clipped to the displayed length; every
/// (clicked, unclicked) pair inside it yields one observation. No clicks,
/// no pairs.
std::vector<PairObservation> extract_pairs(const Query& q,
                                           const Interaction& interaction,
                                           int lookahead, int round);

}  // namespace ol2r
