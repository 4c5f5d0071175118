#pragma once

#define QPROP_VERSION "0.1.0"
