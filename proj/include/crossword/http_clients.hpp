#pragma once

#include <algorithm>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "crossword/corpus.hpp"
#include "crossword/demask.hpp"
#include "crossword/embedding.hpp"
#include "crossword/errors.hpp"

namespace crossword {

inline constexpr const char* kEmbedUrlEnvVar = "CROSSWORD_EMBED_URL";
inline constexpr const char* kModelUrlEnvVar = "CROSSWORD_MODEL_URL";

namespace http_detail {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // defaults to "/"
};

inline SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ServiceUnavailable("endpoint '" + url + "' has no scheme");
  const std::size_t path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

inline nlohmann::json post_json(httplib::Client& client, std::mutex& mutex,
                                const std::string& path,
                                const nlohmann::json& body,
                                const std::string& what) {
  std::lock_guard<std::mutex> lock(mutex);
  const httplib::Result res =
      client.Post(path, body.dump(), "application/json");
  if (!res)
    throw ServiceUnavailable(what + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ServiceUnavailable(what + ": HTTP " + std::to_string(res->status));
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded())
    throw ServiceUnavailable(what + ": response is not JSON");
  return parsed;
}

}  // namespace http_detail

/// Client for an external sentence-embedding service.
/// POST {"sentences": [...]} -> {"dim": D, "vectors": [[...], ...]}.
/// Requests are serialized internally, so concurrent embed calls are safe.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
  explicit HttpEmbeddingProvider(const std::string& endpoint,
                                 std::size_t expected_dimension = kDefaultEmbeddingDim)
      : url_(http_detail::split_url(endpoint)),
        client_(std::make_unique<httplib::Client>(url_.base)),
        dim_(expected_dimension) {
    client_->set_connection_timeout(10);
    client_->set_read_timeout(60);
  }

  std::size_t dimension() const override { return dim_; }
  ProviderKind kind() const override { return ProviderKind::external_service; }

  SemanticVector embed(const Sentence& sentence) const override {
    return embed_many({sentence}).front();
  }

  std::vector<SemanticVector> embed_many(
      const std::vector<Sentence>& sentences) const override {
    nlohmann::json body;
    body["sentences"] = nlohmann::json::array();
    for (const Sentence& s : sentences)
      body["sentences"].push_back(detokenize_sentence(s));

    const nlohmann::json reply = http_detail::post_json(
        *client_, mutex_, url_.path, body, "embedding service");
    if (!reply.contains("dim") || !reply.contains("vectors") ||
        !reply["vectors"].is_array())
      throw ServiceUnavailable("embedding service: malformed response");
    if (reply["dim"].get<std::size_t>() != dim_)
      throw DimensionMismatch("embedding service returned dim " +
                              reply["dim"].dump() + ", expected " +
                              std::to_string(dim_));
    if (reply["vectors"].size() != sentences.size())
      throw DimensionMismatch("embedding service returned " +
                              std::to_string(reply["vectors"].size()) +
                              " vectors for " +
                              std::to_string(sentences.size()) + " sentences");

    std::vector<SemanticVector> out;
    out.reserve(sentences.size());
    for (const auto& row : reply["vectors"]) {
      SemanticVector v = row.get<SemanticVector>();
      if (v.size() != dim_)
        throw DimensionMismatch("embedding service vector of length " +
                                std::to_string(v.size()));
      out.push_back(std::move(v));
    }
    return out;
  }

private:
  http_detail::SplitUrl url_;
  std::unique_ptr<httplib::Client> client_;
  std::size_t dim_;
  mutable std::mutex mutex_;
};

/// Client for an external demasking model.
/// POST {"windows": [[30 ids], ...], "mask_positions": [[...], ...]}
///   -> {"predictions": [[{"position": n, "probs": [...]}, ...], ...]}.
/// The id <-> word association comes from the supplied vocabulary.
class ExternalModelPredictor final : public Predictor {
public:
  ExternalModelPredictor(const std::string& endpoint, Vocabulary vocab)
      : url_(http_detail::split_url(endpoint)),
        client_(std::make_unique<httplib::Client>(url_.base)),
        vocab_(std::move(vocab)) {
    client_->set_connection_timeout(10);
    client_->set_read_timeout(60);
  }

  PredictorKind kind() const override { return PredictorKind::external_model; }
  const Vocabulary& vocabulary() const override { return vocab_; }

  std::vector<std::vector<double>> predict(const TokenWindow& window) const override {
    if (vocab_.word_count() == 0)
      throw NotTrained("external model predictor has no vocabulary");

    nlohmann::json body;
    body["windows"] = nlohmann::json::array();
    body["windows"].push_back(window.ids);
    body["mask_positions"] = nlohmann::json::array();
    body["mask_positions"].push_back(window.mask_positions);

    const nlohmann::json reply = http_detail::post_json(
        *client_, mutex_, url_.path, body, "model service");
    if (!reply.contains("predictions") || !reply["predictions"].is_array() ||
        reply["predictions"].size() != 1)
      throw ServiceUnavailable("model service: malformed response");

    const nlohmann::json& rows = reply["predictions"][0];
    if (rows.size() != window.mask_positions.size())
      throw ShapeMismatch("model service returned " +
                          std::to_string(rows.size()) + " rows for " +
                          std::to_string(window.mask_positions.size()) +
                          " masks");

    std::vector<std::vector<double>> out(window.mask_positions.size());
    std::vector<bool> filled(window.mask_positions.size(), false);
    for (const auto& row : rows) {
      if (!row.contains("position") || !row.contains("probs"))
        throw ServiceUnavailable("model service: malformed prediction row");
      const std::size_t position = row["position"].get<std::size_t>();
      const auto it = std::find(window.mask_positions.begin(),
                                window.mask_positions.end(), position);
      if (it == window.mask_positions.end())
        throw ShapeMismatch("model service predicted unmasked position " +
                            std::to_string(position));
      std::vector<double> probs = row["probs"].get<std::vector<double>>();
      if (probs.size() != vocab_.id_space())
        throw ShapeMismatch("model service probs length " +
                            std::to_string(probs.size()) + ", expected " +
                            std::to_string(vocab_.id_space()));
      const std::size_t index =
          static_cast<std::size_t>(it - window.mask_positions.begin());
      out[index] = std::move(probs);
      filled[index] = true;
    }
    for (bool f : filled) {
      if (!f) throw ShapeMismatch("model service left a mask position unfilled");
    }
    return out;
  }

private:
  http_detail::SplitUrl url_;
  std::unique_ptr<httplib::Client> client_;
  Vocabulary vocab_;
  mutable std::mutex mutex_;
};

}  // namespace crossword
