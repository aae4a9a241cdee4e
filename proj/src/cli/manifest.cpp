#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <memory>

#include "internal.hpp"
#include "mlmod/errors.hpp"

namespace mlmod::cli {

const char* version() { return MLMOD_VERSION; }

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

Manifest::Manifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

void Manifest::input(const std::string& path) {
  if (!path.empty()) inputs_[path] = sha256_file(path);
}

void Manifest::write(const std::string& dir) const {
  using namespace std::chrono;
  nlohmann::json j;
  j["command"] = command_;
  j["argv"] = argv_;
  j["parameters"] = params_;
  j["seed"] = seed_;
  j["version"] = version();
  nlohmann::json inp = nlohmann::json::object();
  for (const auto& [p, d] : inputs_) inp[p] = {{"sha256", d}};
  j["inputs"] = inp;
  j["duration_seconds"] = duration<double>(steady_clock::now() - start_).count();
  write_json((std::filesystem::path(dir) / "manifest.json").string(), j);
}

}  // namespace mlmod::cli
