/*
Copyright 2026 The apxmul Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#ifndef APXMUL_QNN_ARCHIVE_HPP_
#define APXMUL_QNN_ARCHIVE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace apxmul::qnn {

// One named tensor inside an archive. dtype is "u8" or "i32"; payload bytes
// are little-endian at byte_offset in the blob.
struct TensorInfo {
  std::string name;
  std::string dtype;
  std::vector<std::int64_t> shape;
  std::uint64_t byte_offset = 0;
};

// A JSON manifest listing tensors plus one raw binary blob. The manifest's
// "blob" field names the blob file relative to the manifest location.
class TensorArchive {
 public:
  void add_u8(const std::string& name, std::vector<std::int64_t> shape,
              std::span<const std::uint8_t> data);
  void add_i32(const std::string& name, std::vector<std::int64_t> shape,
               std::span<const std::int32_t> data);

  bool contains(const std::string& name) const;
  const TensorInfo& info(const std::string& name) const;  // throws if missing
  const std::vector<TensorInfo>& infos() const { return infos_; }

  std::vector<std::uint8_t> u8(const std::string& name) const;
  std::vector<std::int32_t> i32(const std::string& name) const;

  static TensorArchive load(const std::filesystem::path& manifest_path);
  void save(const std::filesystem::path& manifest_path, const std::string& blob_filename) const;

 private:
  std::size_t index_of(const std::string& name) const;

  std::vector<TensorInfo> infos_;
  std::vector<std::uint8_t> blob_;
};

}  // namespace apxmul::qnn

#endif  // APXMUL_QNN_ARCHIVE_HPP_
