"""Command-line front end and config parsing."""
from .config import Config, ParseResult, load_config, parse_config, serialize
from .main import build_parser, main, run
