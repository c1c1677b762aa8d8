def keep_large(flights, limit):
    kept = []
    for flight in flights:
        if flight.volume > limit:
            kept.append(flight)
    return kept
