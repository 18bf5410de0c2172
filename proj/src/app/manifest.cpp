#include "fastslow/app/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "fastslow/errors.hpp"

namespace fastslow::app {

namespace {

struct DigestCtx {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};
  DigestCtx() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error("sha256 final failed");
    std::string out;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
      std::snprintf(buf, sizeof buf, "%02x", md[i]);
      out += buf;
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  DigestCtx d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  DigestCtx d;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  out << content;
}

nlohmann::json file_inventory(const std::filesystem::path& dir, const std::vector<std::string>& files) {
  nlohmann::json inv = nlohmann::json::array();
  for (const auto& f : files) {
    const auto path = dir / f;
    inv.push_back({{"file", f}, {"bytes", std::filesystem::file_size(path)}, {"sha256", sha256_file(path)}});
  }
  return inv;
}

nlohmann::json make_manifest(const nlohmann::json& scenario, double wall_seconds,
                             const std::filesystem::path& dir, const std::vector<std::string>& files,
                             const nlohmann::json& summary) {
  return {{"tool_version", std::string(kToolVersion)},
          {"scenario", scenario},
          {"wall_time_seconds", wall_seconds},
          {"determinism", "no random numbers are used; identical scenarios give byte-identical CSV files"},
          {"files", file_inventory(dir, files)},
          {"summary", summary}};
}

}  // namespace fastslow::app
