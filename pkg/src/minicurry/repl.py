"""The interactive loop."""

from __future__ import annotations

import sys
from dataclasses import replace

from .errors import MiniCurryError
from .session import STRATEGIES, Config, Session

HELP = """\
commands:
  EXPR [where x, y free]   evaluate a goal
  :load FILE               load a program (replaces the current one)
  :type EXPR               show the type of an expression or function
  :core NAME               show the core code of a function
  :set strategy bfs|dfs    search strategy
  :set answers N|all       number of answers to print
  :set steps N             step limit
  :set depth N|none        search depth limit
  :set optimize on|off     equality optimization
  :set autodata on|off     derive Data wherever possible
  :show                    print the current settings
  :quit                    leave the session"""


def _parse_count(text: str, allow_none: tuple) -> object:
    if text in allow_none:
        return None
    n = int(text)
    if n <= 0:
        raise ValueError("must be positive")
    return n


def _parse_bool(text: str) -> bool:
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on or off, got {text!r}")


class Repl:
    prompt = "minicurry> "

    def __init__(self, config: Config = None, file: str = None, out=None, err=None):
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.session = Session(config or Config(max_answers=None))
        if file:
            self.command(f":load {file}")

    def say(self, text: str):
        print(text, file=self.out)

    def complain(self, text: str):
        print(text, file=self.err)

    def loop(self, stdin=None) -> int:
        stdin = stdin or sys.stdin
        interactive = stdin.isatty()
        while True:
            if interactive:
                self.out.write(self.prompt)
                self.out.flush()
            line = stdin.readline()
            if not line:
                return 0
            if not self.command(line.strip()):
                return 0

    def command(self, line: str) -> bool:
        """Execute one input line; returns False when the session should end."""
        if not line or line.startswith("--"):
            return True
        try:
            if line.startswith(":"):
                return self.meta(line)
            self.evaluate(line)
        except MiniCurryError as e:
            self.complain(str(e))
        except (ValueError, OSError) as e:
            self.complain(f"error: {e}")
        return True

    def evaluate(self, goal: str):
        result = self.session.run(goal)
        for a in result.answers:
            self.say(a.line())
        if not result.answers:
            self.say("-- no answers")
        line = result.exhaustion_line()
        if line:
            self.say(line)

    def meta(self, line: str) -> bool:
        cmd, _, arg = line.partition(" ")
        arg = arg.strip()
        s = self.session
        if cmd in (":q", ":quit"):
            return False
        if cmd in (":h", ":help", ":?"):
            self.say(HELP)
        elif cmd in (":l", ":load"):
            if not arg:
                raise ValueError(":load needs a file name")
            s.load_file(arg)
            self.say(f"-- loaded {arg}: {len(s.user_functions())} function(s)")
        elif cmd in (":t", ":type"):
            self.say(s.type_of(arg))
        elif cmd == ":core":
            for ln in s.dump_core(arg or None):
                self.say(ln)
        elif cmd == ":set":
            self.set(arg)
        elif cmd == ":show":
            c = s.config
            answers = "all" if c.max_answers is None else c.max_answers
            depth = "none" if c.max_depth is None else c.max_depth
            self.say(
                f"strategy {c.strategy}, answers {answers}, steps {c.max_steps}, depth {depth}, "
                f"optimize {'on' if c.optimize else 'off'}, autodata {'on' if c.auto_data else 'off'}"
            )
        else:
            raise ValueError(f"unknown command {cmd} (try :help)")
        return True

    def set(self, arg: str):
        key, _, value = arg.partition(" ")
        value = value.strip()
        s = self.session
        if key == "strategy":
            if value not in STRATEGIES:
                raise ValueError(f"strategy must be one of {', '.join(STRATEGIES)}")
            s.config = replace(s.config, strategy=value)
        elif key == "answers":
            s.config = replace(s.config, max_answers=_parse_count(value, ("all",)))
        elif key == "steps":
            s.config = replace(s.config, max_steps=_parse_count(value, ()))
        elif key == "depth":
            s.config = replace(s.config, max_depth=_parse_count(value, ("none", "off")))
        elif key == "optimize":
            s.config = replace(s.config, optimize=_parse_bool(value))
        elif key in ("autodata", "auto-data"):
            s.config = replace(s.config, auto_data=_parse_bool(value))
            s.reload_for_config()
        else:
            raise ValueError(f"unknown setting {key!r}")


__all__ = ["Repl"]
