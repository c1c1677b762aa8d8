def highest_capacity(flights):
    best = None
    for flight in flights:
        if best is None or flight.capacity > best:
            best = flight.capacity
    return best
