"""duanzai: Chinese homophonic-pun analysis toolkit and chat service.

Pipeline: punchline span tagging (linear-chain CRF over character/pinyin
features) -> original-phrase recovery (fuzzy pinyin lattice decoded against
a character bigram LM) -> clue-injected prompting of a chat-completion
backend.
"""

__version__ = "0.1.0"
