#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mclab/gallery.hpp"
#include "mclab/report.hpp"
#include "mclab/simulate.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitResourceCap = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mclab::Error("cannot write '" + path + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mclab::SpecParseError("cannot open chain spec '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string path_csv(const mclab::ChainModel& chain, const mclab::TrajectoryBatch& batch) {
  std::ostringstream out;
  out << "path_index,x0,xn,S_n,centered\n";
  for (int p = 0; p < batch.n_paths; ++p) {
    out << p << "," << chain.states[batch.x0[p]] << "," << chain.states[batch.xn[p]] << ","
        << batch.sums[p] << "," << batch.centered[p] << "\n";
  }
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"mclab: numerical laboratory for stationary finite-state Markov chains"};
  app.require_subcommand(1);

  // analyze
  std::string spec_path, out_path, format = "json", dump_paths;
  mclab::AnalyzeOptions opts;
  long horizon = opts.horizon;
  long paths = opts.n_paths;
  std::uint64_t seed = 0;
  CLI::App* analyze = app.add_subcommand("analyze", "run every diagnostic on a chain spec");
  analyze->add_option("spec", spec_path, "chain-spec JSON file")->required();
  analyze->add_option("--horizon", horizon, "series horizon (default 4096)");
  analyze->add_option("--seed", seed, "master seed (default 0)");
  analyze->add_option("--paths", paths, "simulated paths (default 20000)");
  analyze->add_option("--out", out_path, "output file (default stdout)");
  analyze->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--dump-paths", dump_paths, "write per-path CSV next to the report");

  // gallery
  std::string gallery_name, gallery_out;
  long gallery_size = 0;
  double gallery_p = 0.0;
  std::uint64_t gallery_seed = 1;
  CLI::App* gallery = app.add_subcommand("gallery", "write a named example chain spec");
  gallery->add_option("name", gallery_name, "iid | two-state | cycle-walk | birth-death | random-dense")
      ->required();
  gallery->add_option("--size", gallery_size, "state count (per-name default)");
  gallery->add_option("--p", gallery_p, "step / flip probability (per-name default)");
  gallery->add_option("--seed", gallery_seed, "seed for random-dense");
  gallery->add_option("--out", gallery_out, "output file")->required();

  // lemmas
  mclab::LemmaCampaignOptions lemma_opts;
  std::string lemmas_out;
  long lemma_cases = -1;
  std::uint64_t lemma_seed = 0;
  CLI::App* lemmas = app.add_subcommand("lemmas", "run the property-test campaigns");
  lemmas->add_option("--cases", lemma_cases, "cases per campaign (default 1000)");
  lemmas->add_option("--seed", lemma_seed, "master seed (default 0)");
  lemmas->add_option("--out", lemmas_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInput;
  }

  try {
    if (analyze->parsed()) {
      const std::string text = read_text(spec_path);
      const mclab::ChainModel chain = mclab::parse_chain_spec(text);
      opts.horizon = static_cast<int>(horizon);
      opts.n_paths = static_cast<int>(paths);
      opts.seed = seed;
      const nlohmann::ordered_json report =
          mclab::analyze_report(chain, opts, mclab::fingerprint_hex(text));
      if (format == "csv") {
        write_text(out_path, mclab::flat_csv(report));
      } else {
        write_text(out_path, report.dump(2) + "\n");
      }
      if (!dump_paths.empty()) {
        const mclab::TrajectoryBatch batch =
            mclab::simulate(chain, opts.clt_steps, opts.n_paths, opts.seed);
        write_text(dump_paths, path_csv(chain, batch));
      }
      return 0;
    }
    if (gallery->parsed()) {
      const mclab::ChainModel chain = mclab::make_gallery_chain(
          gallery_name, static_cast<int>(gallery_size), gallery_p, gallery_seed);
      mclab::write_chain_spec(chain, gallery_out);
      return 0;
    }
    if (lemmas->parsed()) {
      if (lemma_cases >= 0) {
        lemma_opts.cases_dyadic = lemma_cases;
        lemma_opts.cases_prefix = lemma_cases;
        lemma_opts.cases_subadd = std::min<long>(lemma_cases, 200);
      }
      lemma_opts.seed = lemma_seed;
      const nlohmann::ordered_json report = mclab::lemmas_report(lemma_opts);
      write_text(lemmas_out, report.dump(2) + "\n");
      return 0;
    }
  } catch (const mclab::ResourceCap& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const mclab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
