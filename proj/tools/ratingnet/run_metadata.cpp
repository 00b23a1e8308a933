#include <Eigen/Core>
#include <json.hpp>

#include "commands.hpp"
#include "ratingnet/model/checkpoint.hpp"
#include "ratingnet/util/digest.hpp"

#ifndef RATINGNET_VERSION
#define RATINGNET_VERSION "0.0.0"
#endif

namespace ratingnet::cli {

namespace {

nlohmann::ordered_json digests(const std::vector<std::string>& paths) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& p : paths) out.push_back({{"path", p}, {"sha256", util::sha256_file(p)}});
  return out;
}

}  // namespace

std::string run_metadata_json(const RunRecord& rec, const std::vector<std::string>& argv) {
  nlohmann::ordered_json j;
  j["command"] = rec.command;
  j["argv"] = argv;
  j["seed"] = rec.seed;
  j["config"] = rec.effective_config;
  j["config_sha256"] = util::sha256_hex(rec.effective_config);
  j["inputs"] = digests(rec.inputs);
  j["outputs"] = digests(rec.outputs);
  j["versions"] = {
      {"ratingnet", RATINGNET_VERSION},
      {"checkpoint_format", model::kCheckpointVersion},
      {"compiler", __VERSION__},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
  };
  return j.dump(2) + "\n";
}

}  // namespace ratingnet::cli
