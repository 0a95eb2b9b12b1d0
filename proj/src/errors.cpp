// errors.cpp - warning sink

#include "sqzoms/errors.hpp"

#include <iostream>
#include <mutex>

namespace sqz {

namespace {

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

WarningSink& sink()
{
    static WarningSink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

} // namespace

WarningSink set_warning_sink(WarningSink s)
{
    std::lock_guard<std::mutex> lock(sink_mutex());
    WarningSink old = std::move(sink());
    sink() = std::move(s);
    return old;
}

void warn(const std::string& message)
{
    std::lock_guard<std::mutex> lock(sink_mutex());
    if (sink()) sink()(message);
}

} // namespace sqz
