#ifndef REBLUR_DATA_ATOMIC_FILE_H_
#define REBLUR_DATA_ATOMIC_FILE_H_

#include <filesystem>
#include <functional>
#include <string_view>

namespace reblur {

// Calls `writer` with a temporary path next to `path`, then renames the
// temporary over `path`. The temporary is removed if `writer` throws, so a
// failed write never leaves a partial file at `path`.
void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(const std::filesystem::path&)>& writer);

void AtomicWriteText(const std::filesystem::path& path, std::string_view text);

}  // namespace reblur

#endif  // REBLUR_DATA_ATOMIC_FILE_H_
