#pragma once

namespace costru::app {

/// Stderr logger at the level named by COSTRU_LOG (error, info, debug; default info).
void init_logging();

}  // namespace costru::app
