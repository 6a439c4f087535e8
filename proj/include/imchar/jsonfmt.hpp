#pragma once

// Minimal JSON writer.  Floats print with 17 significant digits so output
// round-trips bit-exactly and golden-file comparisons are meaningful;
// exact rationals print as "p/q" strings.

#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace imchar {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// Streaming writer for flat-ish objects; tracks comma placement.
class JsonWriter {
  public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() {
        sep();
        out_ += '{';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_object() {
        out_ += '}';
        fresh_ = false;
        return *this;
    }
    JsonWriter& begin_array() {
        sep();
        out_ += '[';
        fresh_ = true;
        return *this;
    }
    JsonWriter& end_array() {
        out_ += ']';
        fresh_ = false;
        return *this;
    }
    JsonWriter& key(std::string_view k) {
        sep();
        out_ += '"';
        out_ += json_escape(k);
        out_ += "\":";
        fresh_ = true;
        return *this;
    }
    JsonWriter& value(double v) { return raw(fmt_double(v)); }
    JsonWriter& value(long v) { return raw(std::to_string(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(std::string_view v) {
        sep();
        out_ += '"';
        out_ += json_escape(v);
        out_ += '"';
        return *this;
    }
    JsonWriter& null() { return raw("null"); }

    // convenience: key + scalar value
    template <class T>
    JsonWriter& kv(std::string_view k, const T& v) {
        key(k);
        return value(v);
    }

  private:
    JsonWriter& raw(std::string_view text) {
        sep();
        out_ += text;
        return *this;
    }
    void sep() {
        if (!fresh_ && !out_.empty()) {
            char last = out_.back();
            if (last != '{' && last != '[' && last != ':') out_ += ',';
        }
        fresh_ = false;
    }

    std::string out_;
    bool fresh_ = true;
};

}  // namespace imchar
