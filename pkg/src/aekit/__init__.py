"""aekit: measure how many keystrokes an autocomplete function saves.

The toolkit trains small token predictors on patent-claim corpora (forward,
backward, or both directions), replays the keystroke accounting loop over
held-out claims under two selection UIs (digit keys vs. arrow+tab), and
reports the resulting autocomplete-effectiveness (AE) ratios.  An HTTP
server exposes the same accounting for live interactive sessions.
"""

__version__ = "0.1.0"
