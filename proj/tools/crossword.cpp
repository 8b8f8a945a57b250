// Command-line front end: compress / decompress / train / eval sweep /
// toy-markov. Exit codes: 0 success, 2 usage, 3 data or format error,
// 4 service error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossword/corpus.hpp"
#include "crossword/demask.hpp"
#include "crossword/embedding.hpp"
#include "crossword/eval.hpp"
#include "crossword/http_clients.hpp"
#include "crossword/lzw.hpp"
#include "crossword/markov.hpp"
#include "crossword/masking.hpp"
#include "crossword/merge_scan.hpp"
#include "crossword/pipeline.hpp"

namespace {

using namespace crossword;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptStream("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorruptStream("cannot open output file: " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

MaskPolicy parse_policy(const std::string& name) {
  if (name == "semantic") return MaskPolicy::semantic;
  if (name == "frequency") return MaskPolicy::frequency;
  if (name == "semantic-long") return MaskPolicy::semantic_long_sentence;
  throw CLI::ValidationError("--policy", "unknown policy '" + name + "'");
}

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value == nullptr ? std::string() : std::string(value);
}

std::unique_ptr<EmbeddingProvider> make_embedder(const std::string& kind,
                                                 std::string endpoint,
                                                 std::size_t dim) {
  if (kind == "ref") return std::make_unique<ReferenceHashEmbedder>(dim);
  if (endpoint.empty()) endpoint = env_or_empty(kEmbedUrlEnvVar);
  if (endpoint.empty())
    throw CLI::ValidationError(
        "--embed-endpoint",
        "http embedder needs --embed-endpoint or " + std::string(kEmbedUrlEnvVar));
  return std::make_unique<HttpEmbeddingProvider>(endpoint, dim);
}

MarkovChain chain_from_json(const nlohmann::json& j) {
  MarkovChain chain;
  for (const auto& s : j.at("states")) chain.states.push_back(s.get<std::string>());
  for (const auto& row : j.at("transitions"))
    chain.transitions.push_back(row.get<std::vector<double>>());
  validate_chain(chain);
  return chain;
}

int run(int argc, char** argv) {
  CLI::App app{"crossword: semantic text compression by word masking"};
  app.require_subcommand(1);

  // --- compress ---
  auto* compress = app.add_subcommand("compress", "mask and LZ-encode a text file");
  std::string c_input, c_output, c_policy = "semantic", c_embedder = "ref";
  std::string c_endpoint, c_emit_plan;
  double c_ratio = 0.0;
  std::size_t c_dim = kDefaultEmbeddingDim;
  compress->add_option("--input", c_input, "UTF-8 text file")->required();
  compress->add_option("--output", c_output, "output .xwrd file")->required();
  compress->add_option("--ratio", c_ratio, "masking ratio in [0,1)")->required();
  compress->add_option("--policy", c_policy, "word selection policy")
      ->check(CLI::IsMember({"semantic", "frequency", "semantic-long"}));
  compress->add_option("--embedder", c_embedder, "embedding provider")
      ->check(CLI::IsMember({"ref", "http"}));
  compress->add_option("--embed-endpoint", c_endpoint, "embedding service URL");
  compress->add_option("--emit-plan", c_emit_plan, "write the mask plan as JSON");
  compress->add_option("--dim", c_dim, "embedding dimension (default 384)");

  // --- decompress ---
  auto* decompress = app.add_subcommand("decompress", "decode and demask a .xwrd file");
  std::string d_input, d_output, d_predictor = "identity", d_model, d_vocab;
  decompress->add_option("--input", d_input, ".xwrd file")->required();
  decompress->add_option("--output", d_output, "recovered text file")->required();
  decompress->add_option("--predictor", d_predictor, "demasking predictor")
      ->check(CLI::IsMember({"identity", "unigram", "ngram", "http"}));
  decompress->add_option("--model", d_model, "model file (or URL for http)");
  decompress->add_option("--vocab", d_vocab,
                         "model file supplying the vocabulary (http only)");

  // --- train ---
  auto* train = app.add_subcommand("train", "fit a statistical predictor");
  std::string t_input, t_predictor = "ngram", t_save;
  train->add_option("--input", t_input, "training corpus")->required();
  train->add_option("--predictor", t_predictor, "predictor kind")
      ->check(CLI::IsMember({"unigram", "ngram"}));
  train->add_option("--save-model", t_save, "output model file")->required();

  // --- eval sweep ---
  auto* eval = app.add_subcommand("eval", "evaluation harness");
  eval->require_subcommand(1);
  auto* sweep = eval->add_subcommand("sweep", "masking-ratio sweep with baselines");
  std::string s_corpus, s_out, s_policies = "semantic", s_predictor = "ngram";
  std::string s_embedder = "ref", s_endpoint, s_model_endpoint;
  std::string s_ratios = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  SweepOptions sweep_options;
  std::size_t s_dim = kDefaultEmbeddingDim;
  sweep->add_option("--corpus", s_corpus, "corpus file")->required();
  sweep->add_option("--out", s_out, "CSV report path")->required();
  sweep->add_option("--ratios", s_ratios, "comma-separated masking ratios");
  sweep->add_option("--policies", s_policies, "comma-separated policies");
  sweep->add_option("--predictor", s_predictor, "demasking predictor")
      ->check(CLI::IsMember({"identity", "unigram", "ngram", "http"}));
  sweep->add_option("--model-endpoint", s_model_endpoint, "model service URL (http)");
  sweep->add_option("--embedder", s_embedder, "embedding provider")
      ->check(CLI::IsMember({"ref", "http"}));
  sweep->add_option("--embed-endpoint", s_endpoint, "embedding service URL");
  sweep->add_option("--dim", s_dim, "embedding dimension");
  sweep->add_option("--seed", sweep_options.seed, "split seed");
  sweep->add_option("--train-fraction", sweep_options.train_fraction,
                    "training share of sentences");
  sweep->add_flag("--groups", sweep_options.groups,
                  "add per-sentence-masking-ratio similarity columns");

  // --- toy-markov ---
  auto* toy = app.add_subcommand("toy-markov",
                                 "stationary law, entropy and pair-merge scan");
  std::string m_chain, m_out;
  toy->add_option("--chain", m_chain, "chain JSON file")->required();
  toy->add_option("--out", m_out, "CSV scan path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2, help exits 0
  }

  if (*compress) {
    const Text text = segment_text(read_file(c_input));
    const auto provider = make_embedder(c_embedder, c_endpoint, c_dim);
    CompressOptions options;
    options.ratio = c_ratio;
    options.policy = parse_policy(c_policy);
    const CompressOutput result = compress_text(text, *provider, options);
    const std::vector<std::uint8_t> bytes = result.blob.serialize();
    write_file(c_output, std::string(bytes.begin(), bytes.end()));
    if (!c_emit_plan.empty())
      write_file(c_emit_plan, mask_plan_to_json(result.plan).dump(2) + "\n");
    std::fprintf(stderr, "compressed %zu words -> %zu bytes (%.3f bits/word)\n",
                 result.source_word_count, bytes.size(),
                 result.source_word_count == 0
                     ? 0.0
                     : bits_per_word(result.blob, result.source_word_count));
    return 0;
  }

  if (*decompress) {
    const std::string raw = read_file(d_input);
    const CompressedBlob blob = CompressedBlob::deserialize(std::span(
        reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
    const Text masked = decode_blob_text(blob);

    std::unique_ptr<Predictor> predictor;
    if (d_predictor == "identity") {
      predictor = std::make_unique<IdentityPredictor>();
    } else if (d_predictor == "unigram" || d_predictor == "ngram") {
      if (d_model.empty())
        throw CLI::ValidationError("--model", d_predictor + " needs a model file");
      predictor = load_predictor(d_model);
    } else if (d_predictor == "http") {
      std::string endpoint = d_model.empty() ? env_or_empty(kModelUrlEnvVar) : d_model;
      if (endpoint.empty())
        throw CLI::ValidationError(
            "--model", "http predictor needs a URL or " + std::string(kModelUrlEnvVar));
      // Vocabulary from a saved model when given, else from the decoded text.
      Vocabulary vocab;
      if (d_vocab.empty()) {
        vocab = Vocabulary::from_text(masked);
      } else {
        const auto vocab_source = load_predictor(d_vocab);
        vocab = vocab_source->vocabulary();
      }
      predictor = std::make_unique<ExternalModelPredictor>(endpoint, std::move(vocab));
    } else {
      throw CLI::ValidationError("--predictor",
                                 "unknown predictor '" + d_predictor + "'");
    }

    write_file(d_output, detokenize(demask_text(*predictor, masked)));
    return 0;
  }

  if (*train) {
    const Text corpus = segment_text(read_file(t_input));
    PredictorKind kind;
    if (t_predictor == "unigram") {
      kind = PredictorKind::unigram;
    } else if (t_predictor == "ngram") {
      kind = PredictorKind::ngram;
    } else {
      throw CLI::ValidationError("--predictor",
                                 "train supports unigram or ngram");
    }
    const auto predictor = train_predictor(kind, corpus);
    save_predictor(*predictor, t_save);
    std::fprintf(stderr, "trained %s predictor on %zu sentences (%zu words)\n",
                 t_predictor.c_str(), corpus.sentences.size(),
                 corpus.word_count());
    return 0;
  }

  if (*sweep) {
    sweep_options.ratios.clear();
    for (const std::string& ratio : CLI::detail::split(s_ratios, ',')) {
      try {
        sweep_options.ratios.push_back(std::stod(ratio));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--ratios", "'" + ratio + "' is not a number");
      }
    }
    sweep_options.policies.clear();
    for (const std::string& policy : CLI::detail::split(s_policies, ','))
      sweep_options.policies.push_back(parse_policy(policy));

    const Text corpus = segment_text(read_file(s_corpus));
    const auto provider = make_embedder(s_embedder, s_endpoint, s_dim);

    auto [train_split, test_split] =
        split_corpus(corpus, sweep_options.train_fraction, sweep_options.seed);
    std::unique_ptr<Predictor> predictor;
    if (s_predictor == "identity") {
      predictor = std::make_unique<IdentityPredictor>();
    } else if (s_predictor == "unigram") {
      predictor = train_predictor(PredictorKind::unigram, train_split);
    } else if (s_predictor == "ngram") {
      predictor = train_predictor(PredictorKind::ngram, train_split);
    } else if (s_predictor == "http") {
      std::string endpoint =
          s_model_endpoint.empty() ? env_or_empty(kModelUrlEnvVar) : s_model_endpoint;
      if (endpoint.empty())
        throw CLI::ValidationError("--model-endpoint",
                                   "http predictor needs a URL or " +
                                       std::string(kModelUrlEnvVar));
      predictor = std::make_unique<ExternalModelPredictor>(
          endpoint, Vocabulary::from_text(train_split));
    } else {
      throw CLI::ValidationError("--predictor",
                                 "unknown predictor '" + s_predictor + "'");
    }

    const SweepReport report = run_sweep(corpus, *provider, *predictor, sweep_options);
    write_file(s_out, report.to_csv(sweep_options.groups));
    std::fprintf(stderr, "wrote %zu rows to %s\n", report.rows.size(),
                 s_out.c_str());
    return 0;
  }

  if (*toy) {
    const MarkovChain chain =
        chain_from_json(nlohmann::json::parse(read_file(m_chain)));
    const FiniteDistribution pi = stationary_distribution(chain);
    const MergeScanReport scan = pair_merge_scan(pi);

    std::string csv =
        "first,second,merged_entropy,entropy_reduction,merged_huffman_length\n";
    char buf[64];
    auto num = [&buf](double v) {
      std::snprintf(buf, sizeof buf, "%.6f", v);
      return std::string(buf);
    };
    for (const MergeScanRow& row : scan.rows) {
      csv += row.first + ',' + row.second + ',' + num(row.merged_entropy) +
             ',' + num(row.entropy_reduction) + ',' +
             num(row.merged_huffman_length) + '\n';
    }
    write_file(m_out, csv);

    std::printf("stationary:");
    for (const auto& [state, p] : pi.probs)
      std::printf(" %s=%s", state.c_str(), num(p).c_str());
    std::printf("\nentropy: %s bits\n", num(scan.base_entropy).c_str());
    std::printf("huffman expected length: %s bits\n",
                num(scan.base_huffman_length).c_str());
    const MergeScanRow& least_loss = scan.rows[scan.min_reduction_index];
    std::printf("least entropy given up: merge (%s,%s), reduction %s bits\n",
                least_loss.first.c_str(), least_loss.second.c_str(),
                num(least_loss.entropy_reduction).c_str());
    const MergeScanRow& lowest = scan.rows[scan.min_merged_entropy_index];
    std::printf("lowest merged entropy: merge (%s,%s), entropy %s bits\n",
                lowest.first.c_str(), lowest.second.c_str(),
                num(lowest.merged_entropy).c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const crossword::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
