"""Built-in kitchen layouts.

Legend:
    W = Counter (not walkable)
    ' ' = Floor
    O = Onion pile
    T = Tomato pile
    P = Pot
    B = Bowl stack
    S = Serving window
"""

OPEN = [
    'WPWWW',
    'O   S',
    'W   W',
    'B   W',
    'WWWWW',
]

SINGLE_VERTICAL_DIVIDER = [
    'WPWWW',
    'O W S',
    'W W W',
    'B   W',
    'WWWWW',
]

DOUBLE_VERTICAL_DIVIDER = [
    'WPWWW',
    'O W S',
    'W   W',
    'B W W',
    'WWWWW',
]

HORIZONTAL_DIVIDER = [
    'WPWWW',
    'O   S',
    'WWW W',
    'B   W',
    'WWWWW',
]

TWO_DIVIDERS = [
    'WPWWW',
    'O   S',
    'WW WW',
    'B   W',
    'WWWWW',
]

COUNTER_CIRCUIT = [
    'WWPWWWW',
    'O     S',
    'W WWW W',
    'B     W',
    'WWWWWWW',
]

CRAMPED_ROOM = [
    'WWPWW',
    'O   O',
    'W   W',
    'WBWSW',
]

OPEN_TWO_POTS = [
    'WPWPW',
    'O   S',
    'W   W',
    'B   W',
    'WWWWW',
]

LAYOUTS = {
    'open': OPEN,
    'single_vertical_divider': SINGLE_VERTICAL_DIVIDER,
    'double_vertical_divider': DOUBLE_VERTICAL_DIVIDER,
    'horizontal_divider': HORIZONTAL_DIVIDER,
    'two_dividers': TWO_DIVIDERS,
    'counter_circuit': COUNTER_CIRCUIT,
    'cramped_room': CRAMPED_ROOM,
    'open_two_pots': OPEN_TWO_POTS,
}


def get_layout(name):
    """Get the layout text for a built-in name, or None if unknown."""
    rows = LAYOUTS.get(name)
    if rows is None:
        return None
    return '\n'.join(rows)
