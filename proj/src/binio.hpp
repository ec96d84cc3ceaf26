/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Little-endian snapshot helpers shared by the table serializers.

#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "graphroute/common.hpp"

namespace graphroute::binio {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
  }

  template <class T>
    requires std::is_trivially_copyable_v<T>
  void put(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  template <class T>
  void put_span(std::span<const T> v) {
    out_.write(reinterpret_cast<const char*>(v.data()),
               static_cast<std::streamsize>(v.size_bytes()));
  }

  void put_bytes(std::string_view s) { out_.write(s.data(), s.size()); }

  void finish() {
    out_.flush();
    if (!out_) throw Error("snapshot write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw Error("cannot open " + path_);
  }

  template <class T>
    requires std::is_trivially_copyable_v<T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }

  template <class T>
  std::vector<T> get_vector(std::size_t n) {
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()),
             static_cast<std::streamsize>(n * sizeof(T)));
    check();
    return v;
  }

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    check();
    if (got != magic) throw Error(path_ + ": bad snapshot magic");
  }

 private:
  void check() {
    if (!in_) throw Error(path_ + ": truncated snapshot");
  }

  std::ifstream in_;
  std::string path_;
};

}  // namespace graphroute::binio
