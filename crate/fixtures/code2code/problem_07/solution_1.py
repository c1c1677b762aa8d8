def highest_volume(events):
    best = None
    for event in events:
        if best is None or event.volume > best:
            best = event.volume
    return best
