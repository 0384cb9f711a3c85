# Subcommand Handlers
