#include "ol2r/click.hpp"

#include <algorithm>

#include "ol2r/errors.hpp"

namespace ol2r {

ClickProfile ClickProfile::perfect() {
  return {"perfect", {0.0, 0.2, 0.4, 0.8, 1.0}, {0.0, 0.0, 0.0, 0.0, 0.0}};
}

ClickProfile ClickProfile::navigational() {
  return {"navigational", {0.05, 0.3, 0.5, 0.7, 0.95}, {0.2, 0.3, 0.5, 0.7, 0.9}};
}

ClickProfile ClickProfile::informational() {
  return {"informational", {0.4, 0.6, 0.7, 0.8, 0.9}, {0.1, 0.2, 0.3, 0.4, 0.5}};
}

ClickProfile ClickProfile::by_name(std::string_view name) {
  if (name == "perfect") return perfect();
  if (name == "navigational") return navigational();
  if (name == "informational") return informational();
  throw ConfigError("unknown click profile '" + std::string(name) + "'");
}

ClickProfile ClickProfile::custom(std::span<const double> probs) {
  if (probs.size() != 10)
    throw ConfigError("custom click profile needs 10 probabilities");
  ClickProfile p;
  p.name = "custom";
  for (int i = 0; i < 5; ++i) {
    p.click_prob[static_cast<std::size_t>(i)] = probs[static_cast<std::size_t>(i)];
    p.stop_prob[static_cast<std::size_t>(i)] =
        probs[static_cast<std::size_t>(i + 5)];
  }
  for (double v : probs)
    if (v < 0.0 || v > 1.0)
      throw ConfigError("click profile probabilities must lie in [0,1]");
  return p;
}

bool Interaction::any_click() const {
  return std::find(clicks.begin(), clicks.end(), char(1)) != clicks.end();
}

int Interaction::last_click_position() const {
  for (int r = static_cast<int>(clicks.size()); r >= 1; --r)
    if (clicks[static_cast<std::size_t>(r - 1)]) return r;
  return 0;
}

Interaction simulate_clicks(const Query& q, std::span<const int> displayed,
                            const ClickProfile& profile, RandomStream& rng) {
  if (static_cast<int>(displayed.size()) > kDisplayDepth)
    throw DataError("simulate_clicks: displayed list longer than display depth");

  Interaction out;
  out.displayed.assign(displayed.begin(), displayed.end());
  out.clicks.assign(displayed.size(), 0);
  out.last_examined = 0;

  const int len = static_cast<int>(displayed.size());
  for (int r = 1; r <= len; ++r) {
    const Document& doc =
        q.documents[static_cast<std::size_t>(displayed[static_cast<std::size_t>(r - 1)])];
    const auto grade = static_cast<std::size_t>(doc.relevance);
    out.last_examined = r;
    if (rng.bernoulli(profile.click_prob[grade])) {
      out.clicks[static_cast<std::size_t>(r - 1)] = 1;
      if (rng.bernoulli(profile.stop_prob[grade])) break;
    }
  }
  return out;
}

std::vector<PairObservation> extract_pairs(const Query& q,
                                           const Interaction& interaction,
                                           int lookahead, int round) {
  std::vector<PairObservation> pairs;
  const int len = static_cast<int>(interaction.displayed.size());
  const int last_click = interaction.last_click_position();
  if (last_click == 0) return pairs;

  const int examined = std::min(last_click + lookahead, len);
  for (int a = 1; a <= examined; ++a) {
    if (!interaction.clicks[static_cast<std::size_t>(a - 1)]) continue;
    for (int b = 1; b <= examined; ++b) {
      if (interaction.clicks[static_cast<std::size_t>(b - 1)]) continue;
      PairObservation obs;
      obs.round = round;
      obs.features_i =
          q.documents[static_cast<std::size_t>(
                          interaction.displayed[static_cast<std::size_t>(a - 1)])]
              .features;
      obs.features_j =
          q.documents[static_cast<std::size_t>(
                          interaction.displayed[static_cast<std::size_t>(b - 1)])]
              .features;
      obs.label = pair_label(1, 0);
      pairs.push_back(std::move(obs));
    }
  }
  return pairs;
}

}  // namespace ol2r
