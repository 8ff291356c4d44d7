#pragma once

#define ASWT_VERSION "0.1.0"
