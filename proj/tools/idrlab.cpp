// idrlab: latent distribution rectification, style metrics, and the
// Monte Carlo verification suite, wired to CSV/JSON files.
//
// Exit codes: 0 success, 1 tolerance failure, 2 input error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "idrlab/io.hpp"
#include "idrlab/moments.hpp"
#include "idrlab/report.hpp"
#include "idrlab/sfd.hpp"
#include "idrlab/shrinkage.hpp"
#include "idrlab/simulate.hpp"
#include "idrlab/transport.hpp"
#include "idrlab/zeroinit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitToleranceFailure = 1;
constexpr int kExitInputError = 2;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed, bool required) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("IDRLAB_SEED")) return std::strtoull(env, nullptr, 10);
  if (required)
    throw idrlab::ParseError("a seed is required: pass --seed or set IDRLAB_SEED");
  return 0;
}

void require_distinct_output(const std::string& out, const std::vector<std::string>& inputs) {
  for (const auto& in : inputs)
    if (!out.empty() && out == in)
      throw idrlab::ParseError("output path '" + out + "' would overwrite an input");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

idrlab::ChannelMomentsd load_moments_any(const std::string& path) {
  if (ends_with(path, ".json")) return idrlab::io::read_moments_json(path);
  return idrlab::compute_moments(idrlab::io::read_csv_matrix(path));
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text << "\n";
  else
    idrlab::io::write_text(out_path, text);
}

// -------------------------------------------------------------------------

struct RectifyOptions {
  std::string gen_path, ref_path, out_path, meta_path, policy_path;
  std::optional<double> alpha;
  bool length_aware = false;
  bool variance_aware = false;
  bool full_transport = false;
  double alpha_min = 0.2, alpha_max = 0.5, lambda_s = 5.0;
  double delta_sq = 1.0;
  std::optional<double> L_seconds;
};

idrlab::ShrinkagePolicy rectify_policy(const RectifyOptions& opt) {
  int chosen = int(opt.alpha.has_value()) + int(opt.length_aware) +
               int(opt.variance_aware) + int(opt.full_transport) +
               int(!opt.policy_path.empty());
  if (chosen > 1)
    throw idrlab::ParseError("choose exactly one of --alpha, --length-aware, "
                             "--variance-aware, --full-transport, --policy");
  if (!opt.policy_path.empty()) {
    std::ifstream in(opt.policy_path);
    if (!in) throw idrlab::ParseError(opt.policy_path + ": cannot open file");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw idrlab::ParseError(opt.policy_path + ": " + e.what());
    }
    return idrlab::io::policy_from_json(j);
  }
  idrlab::ShrinkagePolicy policy;
  if (opt.length_aware) {
    policy.kind = idrlab::PolicyKind::LengthAware;
    policy.alpha_min = opt.alpha_min;
    policy.alpha_max = opt.alpha_max;
    policy.lambda_seconds = opt.lambda_s;
  } else if (opt.variance_aware) {
    policy.kind = idrlab::PolicyKind::VarianceAware;
    policy.delta_sq_estimate = opt.delta_sq;
  } else if (opt.full_transport) {
    policy.kind = idrlab::PolicyKind::FullTransport;
  } else {
    policy.kind = idrlab::PolicyKind::Fixed;
    policy.alpha = opt.alpha.value_or(0.5);
  }
  return policy;
}

int cmd_rectify(const RectifyOptions& opt, std::uint64_t seed) {
  using namespace idrlab;
  require_distinct_output(opt.out_path, {opt.gen_path, opt.ref_path});
  require_distinct_output(opt.meta_path, {opt.gen_path, opt.ref_path});

  LatentSequence gen = io::read_csv_matrix(opt.gen_path);
  ChannelMomentsd ref_moments;
  long ref_frames = 0;
  if (ends_with(opt.ref_path, ".json")) {
    ref_moments = io::read_moments_json(opt.ref_path);
    if (!opt.L_seconds && rectify_policy(opt).kind != PolicyKind::Fixed &&
        rectify_policy(opt).kind != PolicyKind::FullTransport)
      throw ParseError("moments-JSON references need --ref-seconds for "
                       "length- or variance-aware policies");
  } else {
    LatentSequence ref = io::read_csv_matrix(opt.ref_path);
    ref_frames = ref.rows();
    ref_moments = compute_moments(ref);
  }

  ShrinkagePolicy policy = rectify_policy(opt);
  PolicyContext ctx;
  ctx.L_seconds = opt.L_seconds;
  if (ref_frames > 0)
    ctx.ref_frame_count = ref_frames;
  else if (opt.L_seconds)
    ctx.ref_frame_count = std::lround(*opt.L_seconds * 30.0);
  if (policy.kind == PolicyKind::VarianceAware) ctx.ref_moments = ref_moments;
  ResolvedAlpha resolved = resolve_alpha(policy, ctx);

  ChannelMomentsd gen_moments = compute_moments(gen);
  LatentSequence out = idr_rectify(gen, ref_moments, resolved.alpha);
  io::write_csv_matrix(opt.out_path, out);

  nlohmann::ordered_json meta;
  meta["library_version"] = kVersion;
  meta["seed"] = seed;
  meta["policy"] = io::policy_to_json(policy);
  meta["alpha"] = resolved.alpha;
  meta["deployable"] = resolved.deployable;
  meta["D"] = gen.cols();
  meta["T"] = gen.rows();
  meta["w2_before"] = diag_w2(gen_moments, ref_moments);
  meta["w2_after"] = diag_w2(compute_moments(out), ref_moments);
  if (!opt.meta_path.empty())
    io::write_text(opt.meta_path, meta.dump(2) + "\n");
  else
    std::cout << meta.dump(2) << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------------

struct VerifyOptions {
  std::string suite = "all";
  std::string out_path;
  std::string format = "json";
  long trials = 0;  // 0: per-suite default
  std::uint64_t seed = 0;
};

std::vector<idrlab::ExperimentReport> run_suites(const VerifyOptions& opt) {
  using namespace idrlab;
  std::vector<ExperimentReport> reports;
  auto want = [&](const std::string& name) {
    return opt.suite == "all" || opt.suite == name;
  };

  if (want("transport")) {
    TransportVerificationConfig cfg;
    if (opt.trials > 0) cfg.trials = opt.trials;
    reports.push_back(run_transport_verification(cfg, opt.seed));
  }
  if (want("contraction")) {
    ContractionConfig cfg;
    if (opt.trials > 0) cfg.trials = opt.trials;
    reports.push_back(run_contraction_verification(cfg, derive_seed(opt.seed, 2)));
  }
  if (want("subset")) {
    SubsetConfig cfg;
    if (opt.trials > 0) cfg.trials = opt.trials;
    reports.push_back(
        run_subset_experiment({0, 4, 8, 16, 24, 32}, cfg, derive_seed(opt.seed, 3)));
  }
  if (want("shrinkage")) {
    ShrinkageConfig cfg;
    if (opt.trials > 0) cfg.trials = opt.trials;
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k) grid.push_back(0.05 * k);
    reports.push_back(run_shrinkage_experiment({30, 300}, grid, cfg, derive_seed(opt.seed, 4)));

    PolicyOrderingConfig pcfg;
    if (opt.trials > 0) pcfg.trials = opt.trials;
    reports.push_back(run_policy_ordering(pcfg, derive_seed(opt.seed, 5)));
  }
  if (want("eta2")) {
    const long clips = 50;
    auto null_specs = make_loaded_specs(5, Eigen::VectorXd::Zero(16), 3.0,
                                        derive_seed(opt.seed, 6));
    EtaSquaredResult null_res =
        run_eta_squared_analysis(null_specs, clips, 30, derive_seed(opt.seed, 7));
    ExperimentReport null_rep = null_res.report;
    null_rep.name = "eta2_null";
    null_rep.passed = null_res.eta_sq.maxCoeff() < 0.05;
    reports.push_back(null_rep);

    Eigen::VectorXd ramp(16);
    for (int d = 0; d < 16; ++d) ramp[d] = double(d) / 15.0;
    auto ramp_specs = make_loaded_specs(6, ramp, 0.3, derive_seed(opt.seed, 8));
    EtaSquaredResult ramp_res =
        run_eta_squared_analysis(ramp_specs, clips, 30, derive_seed(opt.seed, 9));
    ExperimentReport ramp_rep = ramp_res.report;
    ramp_rep.name = "eta2_ramp";
    ramp_rep.passed = ramp_res.pearson_r > 0.9;
    reports.push_back(ramp_rep);
  }
  if (want("lemma1")) {
    const long trials = opt.trials > 0 ? opt.trials : 100;
    reports.push_back(run_lemma1_verification(trials, derive_seed(opt.seed, 10)));
  }
  if (reports.empty())
    throw idrlab::ParseError("unknown suite '" + opt.suite +
                             "' (expected transport, contraction, subset, shrinkage, "
                             "eta2, lemma1, or all)");
  return reports;
}

int cmd_verify(const VerifyOptions& opt) {
  using namespace idrlab;
  std::vector<ExperimentReport> reports = run_suites(opt);

  bool all_passed = true;
  for (const auto& rep : reports) {
    std::cout << (rep.passed ? "PASS" : "FAIL") << "  " << rep.name << "\n";
    all_passed = all_passed && rep.passed;
  }

  if (opt.format == "csv") {
    std::string csv;
    for (const auto& rep : reports) csv += report_to_csv(rep);
    if (!opt.out_path.empty()) io::write_text(opt.out_path, csv);
  } else {
    nlohmann::ordered_json j;
    j["library_version"] = kVersion;
    j["seed"] = opt.seed;
    j["suite"] = opt.suite;
    j["passed"] = all_passed;
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& rep : reports) j["reports"].push_back(report_to_json(rep));
    if (!opt.out_path.empty()) io::write_text(opt.out_path, j.dump(2) + "\n");
  }
  return all_passed ? kExitOk : kExitToleranceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagonal-Gaussian latent rectification and style metrics"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "64-bit seed (falls back to IDRLAB_SEED)");

  // moments
  std::string moments_in, moments_out;
  auto* moments_cmd = app.add_subcommand("moments", "channel moments of a latent CSV");
  moments_cmd->add_option("input", moments_in, "latent CSV, one row per frame")->required();
  moments_cmd->add_option("--out", moments_out, "write moments JSON here");

  // w2
  std::string w2_a, w2_b;
  auto* w2_cmd = app.add_subcommand("w2", "diagonal-Gaussian W2 between two inputs");
  w2_cmd->add_option("a", w2_a, "latent CSV or moments JSON")->required();
  w2_cmd->add_option("b", w2_b, "latent CSV or moments JSON")->required();

  // rectify
  RectifyOptions ropt;
  auto* rectify_cmd = app.add_subcommand("rectify", "moment-matching rectification");
  rectify_cmd->fallthrough();  // lets --seed appear after the subcommand name
  rectify_cmd->add_option("gen", ropt.gen_path, "generated latent CSV")->required();
  rectify_cmd->add_option("--ref", ropt.ref_path, "reference latent CSV or moments JSON")
      ->required();
  rectify_cmd->add_option("--out", ropt.out_path, "rectified latent CSV")->required();
  rectify_cmd->add_option("--meta", ropt.meta_path, "metadata JSON path");
  rectify_cmd->add_option("--alpha", ropt.alpha, "fixed interpolation weight");
  rectify_cmd->add_flag("--length-aware", ropt.length_aware, "length-aware policy");
  rectify_cmd->add_flag("--variance-aware", ropt.variance_aware, "variance-aware policy");
  rectify_cmd->add_flag("--full-transport", ropt.full_transport, "alpha = 1");
  rectify_cmd->add_option("--alpha-min", ropt.alpha_min, "length-aware lower clip");
  rectify_cmd->add_option("--alpha-max", ropt.alpha_max, "length-aware upper clip");
  rectify_cmd->add_option("--lambda", ropt.lambda_s, "length-aware half-saturation (s)");
  rectify_cmd->add_option("--delta-sq", ropt.delta_sq, "variance-aware mismatch estimate");
  rectify_cmd->add_option("--ref-seconds", ropt.L_seconds, "reference duration override");
  rectify_cmd->add_option("--policy", ropt.policy_path, "policy JSON file");

  // sfd
  auto* sfd_cmd = app.add_subcommand("sfd", "style feature distance tools");
  sfd_cmd->require_subcommand(1);
  std::vector<std::string> sfd_clips;
  std::string sfd_speaker_id = "speaker", sfd_out;
  auto* profile_cmd = sfd_cmd->add_subcommand("profile", "build a speaker profile");
  profile_cmd->add_option("clips", sfd_clips, "motion CSVs, one row per frame, 330 cols")
      ->required();
  profile_cmd->add_option("--speaker-id", sfd_speaker_id, "profile id");
  profile_cmd->add_option("--out", sfd_out, "profile JSON path");

  std::string score_clip, score_profile;
  auto* score_cmd = sfd_cmd->add_subcommand("score", "SFD of a clip against a profile");
  score_cmd->add_option("clip", score_clip, "motion CSV")->required();
  score_cmd->add_option("profile", score_profile, "profile JSON")->required();

  std::string retrieve_clip;
  std::vector<std::string> retrieve_profiles;
  std::size_t retrieve_k = 1;
  auto* retrieve_cmd = sfd_cmd->add_subcommand("retrieve", "nearest speaker profiles");
  retrieve_cmd->add_option("clip", retrieve_clip, "motion CSV")->required();
  retrieve_cmd->add_option("profiles", retrieve_profiles, "profile JSONs")->required();
  retrieve_cmd->add_option("--k", retrieve_k, "how many ids to return");

  // verify
  VerifyOptions vopt;
  auto* verify_cmd = app.add_subcommand("verify", "Monte Carlo verification suites");
  verify_cmd->fallthrough();  // lets --seed appear after the subcommand name
  verify_cmd->add_option("suite", vopt.suite,
                         "transport|contraction|subset|shrinkage|eta2|lemma1|all");
  verify_cmd->add_option("--trials", vopt.trials, "trial-count override");
  verify_cmd->add_option("--out", vopt.out_path, "report path");
  verify_cmd
      ->add_option("--format", vopt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*moments_cmd) {
      require_distinct_output(moments_out, {moments_in});
      idrlab::ChannelMomentsd m =
          idrlab::compute_moments(idrlab::io::read_csv_matrix(moments_in));
      emit(moments_out, idrlab::io::moments_to_json(m).dump(2));
      return kExitOk;
    }
    if (*w2_cmd) {
      const double d = idrlab::diag_w2(load_moments_any(w2_a), load_moments_any(w2_b));
      std::cout << idrlab::format_double(d) << "\n";
      return kExitOk;
    }
    if (*rectify_cmd) {
      return cmd_rectify(ropt, resolve_seed(seed_flag, false));
    }
    if (*profile_cmd) {
      std::vector<std::string> sorted = sfd_clips;
      std::sort(sorted.begin(), sorted.end());  // deterministic reduction order
      std::vector<idrlab::sfd::MotionClip> clips;
      for (const auto& path : sorted) clips.push_back(idrlab::io::read_csv_matrix(path));
      idrlab::sfd::SpeakerProfile p = idrlab::sfd::build_profile(clips, sfd_speaker_id);
      emit(sfd_out, idrlab::io::profile_to_json(p).dump(2));
      return kExitOk;
    }
    if (*score_cmd) {
      idrlab::sfd::StyleFeatureVector f =
          idrlab::sfd::style_features(idrlab::io::read_csv_matrix(score_clip));
      idrlab::sfd::SpeakerProfile p = idrlab::io::read_profile_json(score_profile);
      std::cout << idrlab::format_double(idrlab::sfd::sfd(f, p)) << "\n";
      return kExitOk;
    }
    if (*retrieve_cmd) {
      idrlab::sfd::StyleFeatureVector f =
          idrlab::sfd::style_features(idrlab::io::read_csv_matrix(retrieve_clip));
      std::vector<idrlab::sfd::SpeakerProfile> profiles;
      for (const auto& path : retrieve_profiles)
        profiles.push_back(idrlab::io::read_profile_json(path));
      for (const auto& id : idrlab::sfd::retrieve_speaker(f, profiles, retrieve_k))
        std::cout << id << "\n";
      return kExitOk;
    }
    if (*verify_cmd) {
      vopt.seed = resolve_seed(seed_flag, true);
      return cmd_verify(vopt);
    }
  } catch (const idrlab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
