#pragma once

// Named operations a config can invoke. Each reads its inputs from the
// config's "params" object.

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "action_rdc/cli/config.hpp"
#include "action_rdc/codingsim.hpp"
#include "action_rdc/optim.hpp"
#include "action_rdc/regions.hpp"

namespace action_rdc::cli {

using RegionSetting = std::function<std::vector<RatePoint>(const Node& params, const SearchConfig& cfg)>;
using SimSetting = std::function<SimReport(const Node& params, std::uint64_t seed)>;

namespace detail {

/// The source pmf: "params.source", or the X marginal of a switching model's joint.
inline Pmf source_for(const Node& p, const ActionModel& m) {
  if (p.has("source")) {
    auto s = parse_pmf(p.at("source"));
    if (!(s.alphabet() == m.source())) p.at("source").fail("alphabet must match the model's source alphabet");
    return s;
  }
  const auto mn = p.at("model");
  for (const char* key : {"switching", "four_state"}) {
    if (mn.has(key)) {
      const auto joint = parse_joint(mn.at(key).at("joint"));
      return Pmf(joint.axis(0), joint.marginal_values({0}));
    }
  }
  p.at("source");  // throws: missing
  return Pmf::uniform(m.source());
}

inline std::vector<DistortionFn> distortions_for(const Node& p, const Alphabet& source, std::size_t count) {
  std::vector<DistortionFn> out;
  if (!p.has("distortions")) {
    for (std::size_t j = 0; j < count; ++j) out.push_back(DistortionFn::hamming(source));
    return out;
  }
  const auto d = p.at("distortions");
  if (d.size() != count) d.fail("expected " + std::to_string(count) + " distortion measures");
  for (std::size_t j = 0; j < count; ++j) out.push_back(parse_distortion(d.at(j), source));
  return out;
}

inline std::array<DistortionFn, 2> two_distortions(const Node& p, const Alphabet& source) {
  auto d = distortions_for(p, source, 2);
  return {d[0], d[1]};
}

inline Pmf binary_source_or_uniform(const Node& p) {
  return p.has("source") ? parse_pmf(p.at("source")) : Pmf::uniform(Alphabet::binary());
}

inline std::vector<RatePoint> one(RatePoint p) { return {std::move(p)}; }

}  // namespace detail

inline const std::map<std::string, RegionSetting>& region_settings() {
  using detail::one;
  static const std::map<std::string, RegionSetting> table = {
      {"example1_rate",
       [](const Node& p, const SearchConfig&) {
         const double p1 = p.at("p1").finite();
         const double delta = p.number_or("delta", 0.0);
         RatePoint r;
         r.rate = example1_rate(p1, delta);
         r.cost = p1;
         r.method = Method::Evaluation;
         r.achieving.push_back({"p(a|x)", example1_action_table(p1, delta)});
         return one(r);
       }},
      {"cor1_switching_rate",
       [](const Node& p, const SearchConfig&) {
         return one(cor1_switching_rate(parse_joint(p.at("joint")), p.count_or("K", 2)));
       }},
      {"thm1_lossless_decoder_actions",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         const auto s = detail::source_for(p, m);
         return one(thm1_lossless_decoder_actions(s, m, p.number_or("budget", 0.0), cfg));
       }},
      {"thm1_eval",
       [](const Node& p, const SearchConfig&) {
         const auto m = parse_action_model(p.at("model"));
         return one(thm1_eval(detail::source_for(p, m), m, parse_table(p.at("pa_x"))));
       }},
      {"cor2_switching_cost_rate",
       [](const Node& p, const SearchConfig& cfg) {
         return one(cor2_switching_cost_rate(parse_joint(p.at("joint")), parse_fixed<4>(p.at("costs")),
                                             p.at("budget").number(), cfg));
       }},
      {"thm3_causal_lossy",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         const auto s = detail::source_for(p, m);
         const auto d = detail::distortions_for(p, s.alphabet(), m.decoders());
         return one(thm3_causal_lossy(s, m, d, p.at("targets").numbers(), p.number_or("budget", 0.0), cfg,
                                      p.optional_count("aux_size")));
       }},
      {"thm2_search",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         const auto s = detail::source_for(p, m);
         LayeredSizes sizes;
         if (p.has("sizes")) {
           const auto z = p.at("sizes");
           sizes = {z.optional_count("u"), z.optional_count("v1"), z.optional_count("v2")};
         }
         return one(thm2_search(s, m, detail::two_distortions(p, s.alphabet()), parse_fixed<2>(p.at("targets")),
                                p.number_or("budget", 0.0), cfg, sizes));
       }},
      {"hb_kaspi_search",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         const auto s = detail::source_for(p, m);
         return one(hb_kaspi_search(s, m, detail::two_distortions(p, s.alphabet()), parse_fixed<2>(p.at("targets")),
                                    p.number_or("budget", 0.0), cfg, p.optional_count("u_size"),
                                    p.optional_count("v1_size")));
       }},
      {"prop2_switching_lossy",
       [](const Node& p, const SearchConfig& cfg) {
         const auto joint = parse_joint(p.at("joint"));
         const auto costs = p.has("costs") ? parse_fixed<2>(p.at("costs")) : std::array<double, 2>{0.0, 0.0};
         return one(prop2_switching_lossy(joint, detail::two_distortions(p, joint.axis(0)), p.at("D1").finite(),
                                          p.at("D2").finite(), p.number_or("budget", 0.0), costs, cfg,
                                          p.optional_count("aux_size"), p.count_or("inner_resolution", 11)));
       }},
      {"example2_rate",
       [](const Node& p, const SearchConfig&) {
         const double d1 = p.at("D1").finite();
         const double d2 = p.at("D2").finite();
         const auto s = example2_solve(d1, d2);
         RatePoint r;
         r.rate = s.rate;
         r.distortions = {d1, d2};
         r.details["alpha"] = s.alpha;
         return one(r);
       }},
      {"gaussian_compdel_rate",
       [](const Node& p, const SearchConfig&) {
         return one(gaussian_compdel(p.at("P").finite(), p.at("N").finite(), p.at("D1").finite(),
                                     p.at("D2").finite()));
       }},
      {"dsbs_compdel_rate",
       [](const Node& p, const SearchConfig&) {
         return one(dsbs_compdel(p.at("p").finite(), p.at("D1").finite(), p.at("D2").finite()));
       }},
      {"thm_enc_lossless_rate",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         return one(thm_enc_lossless_rate(detail::source_for(p, m), m, p.number_or("budget", 0.0), cfg));
       }},
      {"example3_rate",
       [](const Node& p, const SearchConfig& cfg) {
         return one(example3_rate(parse_joint(p.at("joint")), p.at("C1").number(), p.at("C2").number(),
                                  p.at("budget").number(), cfg));
       }},
      {"prop_rlimit_rate",
       [](const Node& p, const SearchConfig& cfg) {
         const auto s = parse_pmf(p.at("source"));
         const auto d = p.has("distortion") ? parse_distortion(p.at("distortion"), s.alphabet())
                                            : DistortionFn::hamming(s.alphabet());
         const auto chn = p.at("action_channel");
         const auto actions = parse_alphabet(chn.at("actions"));
         const auto outputs = parse_alphabet(chn.at("outputs"));
         const auto rows = chn.at("rows");
         const auto ch = at_key(rows, [&] { return Channel(actions, outputs, rows.matrix()); });
         const auto c = p.at("costs");
         const auto cost = at_key(c, [&] { return CostFn(actions, c.numbers()); });
         auto mode = RlimitMode::Decomposition;
         if (p.has("mode")) {
           const auto m = p.at("mode").str();
           if (m == "joint") {
             mode = RlimitMode::JointSearch;
           } else if (m != "decomposition") {
             p.at("mode").fail("expected 'decomposition' or 'joint'");
           }
         }
         return one(prop_rlimit_rate(s, d, p.at("D").finite(), ch, cost, p.number_or("budget", 0.0),
                                     p.at("R_A").number(), cfg, mode));
       }},
      {"prop_sr_region",
       [](const Node& p, const SearchConfig& cfg) {
         const auto m = parse_action_model(p.at("model"));
         const auto s = detail::source_for(p, m);
         const auto d = detail::two_distortions(p, s.alphabet());
         SrOptions opt;
         if (p.has("r1_values")) opt.r1_values = p.at("r1_values").numbers();
         opt.u_size = p.optional_count("u_size");
         opt.inner_resolution = p.count_or("inner_resolution", opt.inner_resolution);
         return prop_sr_region(s, m, d[0], d[1], p.at("D1").finite(), p.at("D2").finite(),
                               p.number_or("budget", 0.0), cfg, opt);
       }},
      {"blahut_arimoto_rd",
       [](const Node& p, const SearchConfig&) {
         const auto s = parse_pmf(p.at("source"));
         const auto d = p.has("distortion") ? parse_distortion(p.at("distortion"), s.alphabet())
                                            : DistortionFn::hamming(s.alphabet());
         const double D = p.at("D").finite();
         const auto sol = blahut_arimoto_rd_solve(s, d, D);
         RatePoint r;
         r.rate = sol.rate;
         r.distortions = {sol.distortion};
         r.method = Method::Search;
         r.achieving.push_back({"p(xhat|x)", ConditionalTable(s.size(), d.recon_size(), sol.test_channel)});
         return one(r);
       }},
  };
  return table;
}

inline const std::map<std::string, SimSetting>& sim_settings() {
  static const std::map<std::string, SimSetting> table = {
      {"simulate_identity_switch",
       [](const Node& p, std::uint64_t seed) {
         return simulate_identity_switch(p.at("n").count(), p.count_or("K", 2), detail::binary_source_or_uniform(p),
                                         p.at("trials").count(), seed);
       }},
      {"simulate_sw_modulo",
       [](const Node& p, std::uint64_t seed) {
         SwModuloOptions opt;
         opt.margin = p.number_or("margin", 0.0);
         if (p.has("total_rate")) opt.total_rate = p.at("total_rate").finite();
         return simulate_sw_modulo(parse_joint(p.at("joint")), p.at("n").count(), opt, p.at("trials").count(), seed);
       }},
      {"simulate_cor2_partition",
       [](const Node& p, std::uint64_t seed) {
         return simulate_cor2_partition(parse_joint(p.at("joint")), parse_table(p.at("pa_x")),
                                        parse_fixed<4>(p.at("costs")), p.at("n").count(), p.number_or("margin", 0.0),
                                        p.at("trials").count(), seed);
       }},
      {"simulate_dsbs_compdel",
       [](const Node& p, std::uint64_t seed) {
         return simulate_dsbs_compdel(p.at("p").finite(), p.at("rate").finite(), p.at("n").count(),
                                      p.at("trials").count(), seed);
       }},
      {"simulate_thm1_generic",
       [](const Node& p, std::uint64_t seed) {
         const auto m = parse_action_model(p.at("model"));
         return simulate_thm1_generic(detail::source_for(p, m), m, parse_table(p.at("pa_x")),
                                      p.number_or("margin", 0.0), p.at("n").count(), p.at("trials").count(), seed);
       }},
  };
  return table;
}

}  // namespace action_rdc::cli
