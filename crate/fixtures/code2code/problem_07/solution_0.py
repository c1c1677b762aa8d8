def max_volume(events):
    return max(event.volume for event in events)
