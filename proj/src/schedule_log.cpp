// SPDX-License-Identifier: Apache-2.0

#include <coloc/schedule_log.hpp>

#include <cstdlib>
#include <cstring>

namespace coloc {

std::shared_ptr<schedule_log> schedule_log::global()
{
    static std::shared_ptr<schedule_log> instance = [] {
        auto log = std::make_shared<schedule_log>();
        char const* env = std::getenv("COLOC_RECORD_SCHEDULE");
        if (env != nullptr && env[0] != '\0' && std::strcmp(env, "0") != 0)
            log->set_enabled(true);
        return log;
    }();
    return instance;
}

}    // namespace coloc
