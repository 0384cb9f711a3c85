# Core Utilities & Configuration

