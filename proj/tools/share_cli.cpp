// share: scene reconstruction and human translation grounding from a
// preprocessed input bundle.
//
//   share reconstruct --input BUNDLE --output DIR [--iterations N] [--lr X]
//                     [--sigma S] [--vertex-stride K] [--verbose]
//   share synth --output DIR [--spec SPEC.json] [--seed N]
//   share eval --motion motion.json --truth truth.json --bundle BUNDLE

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "share/error.hpp"
#include "share/io.hpp"
#include "share/pipeline.hpp"
#include "share/synth.hpp"

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  share::OptimizeConfig optimize;
  bool verbose = false;
};

struct SynthArgs {
  std::string spec;
  std::string output;
  std::optional<std::uint64_t> seed;
};

struct EvalArgs {
  std::string motion;
  std::string truth;
  std::string bundle;
};

int cmd_reconstruct(const RunConfig& run) {
  const share::InputBundle bundle = share::load_bundle(run.input);
  std::cerr << "loaded bundle: T=" << bundle.frame_count() << " image=" << bundle.width << "x"
            << bundle.height << " vertices=" << bundle.vertex_count() << "\n";

  const int every = run.verbose ? 1 : 50;
  const int last = run.optimize.iterations - 1;
  auto progress = [&](std::size_t it, const share::LossTerms& loss) {
    if (static_cast<int>(it) % every == 0 || static_cast<int>(it) == last) {
      std::cerr << "iter " << it << "  loss " << loss.total << "  body " << loss.body << "  root "
                << loss.root << "\n";
    }
  };
  const share::PipelineResult result = share::run_pipeline(bundle, run.optimize, progress);
  if (result.scene.overlap_pixels > 0) {
    std::cerr << "warning: " << result.scene.overlap_pixels
              << " pixels are human in both keyframes and were left out of the scene\n";
  }
  std::cerr << "scale factor " << result.summary.alpha << ", scene points "
            << result.summary.scene_points << ", final loss " << result.report.final_loss.total
            << "\n";

  share::StagedOutputs outputs;
  outputs.add("scene.ply", share::encode_scene_ply(result.scene.scene));
  outputs.add("motion.json", share::encode_motion_json(
                                 share::make_motion_record(result.report, bundle.motion, run.optimize)));
  outputs.add("report.json", share::encode_report_json(result.summary));
  outputs.commit(run.output);
  return 0;
}

int cmd_synth(const SynthArgs& args) {
  share::SynthSpec spec;
  if (!args.spec.empty()) spec = share::synth_spec_from_json(share::read_file(args.spec));
  if (args.seed) spec.seed = *args.seed;
  const share::SynthResult result = share::generate(spec);

  share::StagedOutputs outputs;
  share::stage_bundle(result.bundle, outputs);
  outputs.add("truth.json", share::encode_truth_json(result.truth_translations));
  outputs.add("synth_spec.json", share::synth_spec_to_json(spec));
  outputs.commit(args.output);
  std::cerr << "wrote synthetic bundle with " << result.bundle.frame_count() << " frames to "
            << args.output << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  const share::InputBundle bundle = share::load_bundle(args.bundle);
  const share::MotionRecord motion = share::read_motion_json(args.motion);
  const std::vector<share::Vec3> truth = share::read_truth_json(args.truth);
  const share::EvalResult result = share::evaluate_translations(bundle, motion.translations, truth);
  std::cout << share::encode_eval_json(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene point map reconstruction and human translation grounding"};
  app.require_subcommand(1);

  RunConfig run;
  auto* reconstruct = app.add_subcommand("reconstruct", "Build the scene and optimize translations");
  reconstruct->add_option("--input,-i", run.input, "Input bundle directory")->required();
  reconstruct->add_option("--output,-o", run.output, "Output directory")->required();
  reconstruct->add_option("--iterations", run.optimize.iterations, "Adam iterations")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  reconstruct->add_option("--lr", run.optimize.learning_rate, "Adam learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  reconstruct->add_option("--sigma", run.optimize.gaussian_sigma,
                          "Gaussian sigma (frames) for the reference root trajectory")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  reconstruct->add_option("--vertex-stride", run.optimize.vertex_stride,
                          "Use every n-th body vertex in the keyframe Chamfer terms")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  reconstruct->add_flag("--verbose,-v", run.verbose, "Log the loss at every iteration");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic input bundle with ground truth");
  synth_cmd->add_option("--spec", synth.spec, "Synthetic scene spec (JSON); defaults when omitted");
  synth_cmd->add_option("--output,-o", synth.output, "Output bundle directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Override the spec's random seed");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Report MRPE and V2V against ground truth");
  eval_cmd->add_option("--motion", eval.motion, "motion.json from reconstruct")->required();
  eval_cmd->add_option("--truth", eval.truth, "truth.json from synth")->required();
  eval_cmd->add_option("--bundle", eval.bundle, "Input bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(share::ErrorKind::kValidation);
  }

  try {
    if (*reconstruct) return cmd_reconstruct(run);
    if (*synth_cmd) return cmd_synth(synth);
    if (*eval_cmd) return cmd_eval(eval);
  } catch (const share::Error& e) {
    std::cerr << "error (" << share::to_string(e.kind()) << "): " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return static_cast<int>(share::ErrorKind::kIo);
  }
  return 0;
}
