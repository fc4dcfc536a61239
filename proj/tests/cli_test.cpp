// CLI integration checks: exit codes, file outputs and determinism of the
// fgrt binary. Usage: fgrt_cli_test <path-to-fgrt> <data-dir>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: fgrt_cli_test <fgrt-binary> <data-dir>\n";
    return 2;
  }
  const std::string fgrt = argv[1];
  const fs::path data_dir = argv[2];
  const fs::path wine = data_dir / "wine.csv";
  const fs::path work = fs::temp_directory_path() / "fgrt_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string quiet = " > " + (work / "stdout.txt").string() + " 2> " +
                            (work / "stderr.txt").string();

  // usage errors exit 1
  check(run(fgrt + " fit --model " + (work / "m.json").string() + quiet) == 1,
        "fit without --data exits 1");
  check(run(fgrt + " --help" + quiet) == 0, "--help exits 0");
  check(run(fgrt + " evaluate --data " + wine.string() + " --output " +
            (work / "r.csv").string() + " --tnorm bogus" + quiet) == 1,
        "unknown t-norm exits 1");

  // data errors exit 2
  check(run(fgrt + " fit --data /nonexistent.csv --model " +
            (work / "m.json").string() + quiet) == 2,
        "missing data file exits 2");

  // fit then predict on the training file
  const fs::path model = work / "wine_model.json";
  check(run(fgrt + " fit --data " + wine.string() + " --model " +
            model.string() + " > " + (work / "rulebase.txt").string()) == 0,
        "fit exits 0");
  check(fs::exists(model), "fit writes the model file");
  check(slurp(work / "rulebase.txt").find("IF ") != std::string::npos,
        "fit prints the rulebase");

  const fs::path preds = work / "preds.csv";
  check(run(fgrt + " predict --data " + wine.string() + " --model " +
            model.string() + " --output " + preds.string() + " > " +
            (work / "predict_out.txt").string()) == 0,
        "predict exits 0");
  const std::string pred_text = slurp(preds);
  check(pred_text.find("index,predicted_class") != std::string::npos,
        "prediction file has the header row");
  const std::string predict_out = slurp(work / "predict_out.txt");
  const std::size_t acc_pos = predict_out.find("accuracy=");
  check(acc_pos != std::string::npos, "predict reports training accuracy");
  if (acc_pos != std::string::npos) {
    const double acc = std::atof(predict_out.c_str() + acc_pos + 9);
    // model must beat the wine majority-class prior (71/178)
    check(acc >= 71.0 / 178.0, "training accuracy beats the class prior");
  }

  // evaluate twice with the same seed: byte-identical outputs
  const fs::path r1 = work / "report1.csv";
  const fs::path r2 = work / "report2.csv";
  const std::string eval_flags = " evaluate --data " + wine.string() +
                                 " --folds 5 --seed 42 --output ";
  check(run(fgrt + eval_flags + r1.string() + quiet) == 0, "evaluate exits 0");
  check(run(fgrt + eval_flags + r2.string() + quiet) == 0, "evaluate rerun exits 0");
  check(!slurp(r1).empty() && slurp(r1) == slurp(r2),
        "evaluate reports are byte-identical across runs");
  check(slurp(work / "report1.csv.manifest") ==
            slurp(work / "report2.csv.manifest"),
        "evaluate manifests are byte-identical across runs");

  // sweep over a small axis
  const fs::path sweep_csv = work / "sweep.csv";
  check(run(fgrt + " sweep --data " + wine.string() +
            " --axis-max-rules 5,10 --folds 3 --output " + sweep_csv.string() +
            quiet) == 0,
        "sweep exits 0");
  const std::string sweep_text = slurp(sweep_csv);
  check(sweep_text.find("max_rules=5") != std::string::npos &&
            sweep_text.find("max_rules=10") != std::string::npos,
        "sweep report contains one cell per axis value");

  // partition dump
  const fs::path dump = work / "partitions.csv";
  check(run(fgrt + " optimize-partitions --data " + wine.string() +
            " --output " + dump.string() + quiet) == 0,
        "optimize-partitions exits 0");
  check(slurp(dump).find("feature,term,a,b,c,d,si_before,si_after,evaluations") !=
            std::string::npos,
        "partition dump has the documented header");

  // explain output mentions fired rules
  check(run(fgrt + " predict --data " + wine.string() + " --model " +
            model.string() + " --output " + (work / "p2.csv").string() +
            " --explain > " + (work / "explain.txt").string()) == 0,
        "predict --explain exits 0");
  check(slurp(work / "explain.txt").find("[firing=") != std::string::npos,
        "explanations list fired rules");

  // config file provides defaults, explicit flags win
  {
    std::ofstream cfg(work / "fgrt.ini");
    cfg << "[fit]\nmax-rules=7\nmax-depth=2\n";
  }
  const fs::path m_cfg = work / "cfg_model.json";
  const std::string with_config =
      fgrt + " --config " + (work / "fgrt.ini").string() + " fit --data " +
      wine.string() + " --model " + m_cfg.string();
  check(run(with_config + quiet) == 0, "fit with --config exits 0");
  check(slurp(m_cfg).find("\"max_rules\": 7") != std::string::npos,
        "config file sets the rule budget");
  check(run(with_config + " --max-rules 9" + quiet) == 0,
        "fit with --config and an explicit flag exits 0");
  check(slurp(m_cfg).find("\"max_rules\": 9") != std::string::npos,
        "explicit flags override the config file");

  std::printf("%s: %d failure(s)\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
