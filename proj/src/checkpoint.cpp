/*
   Copyright 2026 The Chainwatch Authors

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

#include <chainwatch/collector.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace chainwatch::collector {

using nlohmann::json;

json to_json(const CollectorCheckpoint& cp) {
    return json{
        {"last_block_number", cp.last_block_number},
        {"last_block_hash", cp.last_block_hash},
        {"datapoints_emitted", cp.datapoints_emitted},
        {"updated_at", cp.updated_at},
    };
}

CollectorCheckpoint checkpoint_from_json(const json& j) {
    if (!j.is_object()) throw CheckpointError("checkpoint is not a JSON object");
    try {
        CollectorCheckpoint cp;
        const auto& n = j.at("last_block_number");
        if (!n.is_number_unsigned()) throw CheckpointError("last_block_number must be an unsigned integer");
        cp.last_block_number = n.get<std::uint64_t>();
        cp.last_block_hash = j.at("last_block_hash").get<std::string>();
        if (!cp.last_block_hash.empty() && !is_hex_bytes(cp.last_block_hash, 32)) {
            throw CheckpointError("last_block_hash is not a 32-byte hex string");
        }
        const auto& d = j.at("datapoints_emitted");
        if (!d.is_number_unsigned()) throw CheckpointError("datapoints_emitted must be an unsigned integer");
        cp.datapoints_emitted = d.get<std::uint64_t>();
        cp.updated_at = j.at("updated_at").get<TimestampMs>();
        return cp;
    } catch (const json::exception& e) {
        throw CheckpointError(std::string{"malformed checkpoint: "} + e.what());
    }
}

namespace {

    void write_all(int fd, const std::string& data, const std::string& what) {
        const char* p = data.data();
        std::size_t left = data.size();
        while (left > 0) {
            const ssize_t n = ::write(fd, p, left);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw CheckpointError("write " + what + ": " + std::strerror(errno));
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
    }

}  // namespace

void save_checkpoint(const CollectorCheckpoint& cp, const std::filesystem::path& path) {
    const std::string tmp = path.string() + ".tmp";
    const std::string body = to_json(cp).dump() + "\n";

    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw CheckpointError("open " + tmp + ": " + std::strerror(errno));
    try {
        write_all(fd, body, tmp);
        if (::fsync(fd) != 0) throw CheckpointError("fsync " + tmp + ": " + std::strerror(errno));
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);

    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        throw CheckpointError("rename " + tmp + ": " + std::strerror(errno));
    }
    // persist the rename itself
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path{"."};
    const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

CollectorCheckpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t start_block) {
    std::ifstream in{path};
    if (!in) {
        if (!std::filesystem::exists(path)) return CollectorCheckpoint{start_block, "", 0, 0};
        throw CheckpointError("cannot read checkpoint " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw CheckpointError("checkpoint " + path.string() + " is not valid JSON");
    return checkpoint_from_json(j);
}

}  // namespace chainwatch::collector
