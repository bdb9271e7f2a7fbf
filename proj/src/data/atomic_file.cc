#include "reblur/data/atomic_file.h"

#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace reblur {

void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(const std::filesystem::path&)>& writer) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    writer(tmp);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  std::filesystem::rename(tmp, path);
}

void AtomicWriteText(const std::filesystem::path& path, std::string_view text) {
  AtomicWrite(path, [&](const std::filesystem::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  });
}

}  // namespace reblur
