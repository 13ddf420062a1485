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
#include "apxmul/qnn/archive.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apxmul::qnn {

namespace {

std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw std::runtime_error("negative tensor dimension");
    n *= d;
  }
  return n;
}

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "u8") return 1;
  if (dtype == "i32") return 4;
  throw std::runtime_error("unknown tensor dtype: " + dtype);
}

}  // namespace

void TensorArchive::add_u8(const std::string& name, std::vector<std::int64_t> shape,
                           std::span<const std::uint8_t> data) {
  if (contains(name)) throw std::runtime_error("duplicate tensor name: " + name);
  if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw std::runtime_error("shape does not match data size for " + name);
  }
  infos_.push_back(TensorInfo{name, "u8", std::move(shape), blob_.size()});
  blob_.insert(blob_.end(), data.begin(), data.end());
}

void TensorArchive::add_i32(const std::string& name, std::vector<std::int64_t> shape,
                            std::span<const std::int32_t> data) {
  if (contains(name)) throw std::runtime_error("duplicate tensor name: " + name);
  if (shape_numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw std::runtime_error("shape does not match data size for " + name);
  }
  infos_.push_back(TensorInfo{name, "i32", std::move(shape), blob_.size()});
  for (std::int32_t v : data) {
    const auto u = static_cast<std::uint32_t>(v);
    blob_.push_back(static_cast<std::uint8_t>(u & 0xff));
    blob_.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
    blob_.push_back(static_cast<std::uint8_t>((u >> 16) & 0xff));
    blob_.push_back(static_cast<std::uint8_t>((u >> 24) & 0xff));
  }
}

bool TensorArchive::contains(const std::string& name) const {
  for (const auto& info : infos_) {
    if (info.name == name) return true;
  }
  return false;
}

std::size_t TensorArchive::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < infos_.size(); ++i) {
    if (infos_[i].name == name) return i;
  }
  throw std::runtime_error("tensor not found in archive: " + name);
}

const TensorInfo& TensorArchive::info(const std::string& name) const {
  return infos_[index_of(name)];
}

std::vector<std::uint8_t> TensorArchive::u8(const std::string& name) const {
  const TensorInfo& ti = info(name);
  if (ti.dtype != "u8") throw std::runtime_error(name + " is not a u8 tensor");
  const std::size_t count = static_cast<std::size_t>(shape_numel(ti.shape));
  return {blob_.begin() + ti.byte_offset, blob_.begin() + ti.byte_offset + count};
}

std::vector<std::int32_t> TensorArchive::i32(const std::string& name) const {
  const TensorInfo& ti = info(name);
  if (ti.dtype != "i32") throw std::runtime_error(name + " is not an i32 tensor");
  const std::size_t count = static_cast<std::size_t>(shape_numel(ti.shape));
  std::vector<std::int32_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t o = ti.byte_offset + 4 * i;
    out[i] = static_cast<std::int32_t>(
        static_cast<std::uint32_t>(blob_[o]) | (static_cast<std::uint32_t>(blob_[o + 1]) << 8) |
        (static_cast<std::uint32_t>(blob_[o + 2]) << 16) |
        (static_cast<std::uint32_t>(blob_[o + 3]) << 24));
  }
  return out;
}

TensorArchive TensorArchive::load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad archive manifest " + manifest_path.string() + ": " + e.what());
  }

  TensorArchive archive;
  const auto blob_name = j.at("blob").get<std::string>();
  const auto blob_path = manifest_path.parent_path() / blob_name;
  std::ifstream blob(blob_path, std::ios::binary);
  if (!blob) throw std::runtime_error("cannot open blob " + blob_path.string());
  archive.blob_.assign(std::istreambuf_iterator<char>(blob), std::istreambuf_iterator<char>());

  for (const auto& tj : j.at("tensors")) {
    TensorInfo ti;
    ti.name = tj.at("name").get<std::string>();
    ti.dtype = tj.at("dtype").get<std::string>();
    ti.shape = tj.at("shape").get<std::vector<std::int64_t>>();
    ti.byte_offset = tj.at("byte_offset").get<std::uint64_t>();
    const std::size_t bytes = static_cast<std::size_t>(shape_numel(ti.shape)) * dtype_size(ti.dtype);
    if (ti.byte_offset + bytes > archive.blob_.size()) {
      throw std::runtime_error("tensor " + ti.name + " extends past blob end");
    }
    if (archive.contains(ti.name)) throw std::runtime_error("duplicate tensor name: " + ti.name);
    archive.infos_.push_back(std::move(ti));
  }
  return archive;
}

void TensorArchive::save(const std::filesystem::path& manifest_path,
                         const std::string& blob_filename) const {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& ti : infos_) {
    tensors.push_back({{"name", ti.name},
                       {"dtype", ti.dtype},
                       {"shape", ti.shape},
                       {"byte_offset", ti.byte_offset}});
  }
  const nlohmann::json j = {{"blob", blob_filename}, {"tensors", tensors}};
  std::ofstream out(manifest_path);
  if (!out) throw std::runtime_error("cannot open " + manifest_path.string() + " for writing");
  out << j.dump(2) << "\n";

  const auto blob_path = manifest_path.parent_path() / blob_filename;
  std::ofstream blob(blob_path, std::ios::binary);
  if (!blob) throw std::runtime_error("cannot open " + blob_path.string() + " for writing");
  blob.write(reinterpret_cast<const char*>(blob_.data()),
             static_cast<std::streamsize>(blob_.size()));
  if (!blob) throw std::runtime_error("blob write failed: " + blob_path.string());
}

}  // namespace apxmul::qnn
