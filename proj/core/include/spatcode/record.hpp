#pragma once

#include <cstdint>
#include <vector>

#include "spatcode/composite.hpp"
#include "spatcode/encoding.hpp"
#include "spatcode/schema.hpp"

namespace spatcode {

using RecordId = std::uint64_t;

// One item of the stream: pre-computed unit content embeddings plus the raw
// timestamp and coordinate they were observed with.
struct StreamRecord {
    RecordId id = 0;
    std::vector<std::vector<double>> content;  // one unit vector per content slot
    Timestamp time = 0.0;
    GeoCoordinate location;
};

// Encodes time and location at the given scale and fuses them with the
// record's content embeddings into the stored composite vector.
inline CompositeVector encode_record(const ModalitySchema& schema,
                                     const StreamRecord& record,
                                     TemporalScale scale) {
    if (static_cast<int>(record.content.size()) != schema.content_count()) {
        throw SchemaError("record carries " + std::to_string(record.content.size()) +
                          " content embeddings, schema expects " +
                          std::to_string(schema.content_count()));
    }
    std::vector<ModalityEmbedding> content;
    content.reserve(record.content.size());
    for (int slot = 0; slot < schema.content_count(); ++slot) {
        content.push_back({slot, record.content[static_cast<std::size_t>(slot)]});
    }
    return compose_record(schema, content, encode_time(record.time, scale),
                          encode_geo(record.location));
}

}  // namespace spatcode
