#pragma once

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <string>
#include <thread>

namespace aswt {

// Scratch name next to `path`, distinct per process and thread so concurrent writers never share it.
inline std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += "." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 1000000007) + ".tmp";
  return tmp;
}

}  // namespace aswt
