#include "streamlink/log.hpp"

#include <iostream>
#include <utility>

namespace streamlink {
namespace {

WarningSink& current_sink() {
    static WarningSink sink;
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    return std::exchange(current_sink(), std::move(sink));
}

void warn(const std::string& message) {
    if (const auto& sink = current_sink()) {
        sink(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

}  // namespace streamlink
