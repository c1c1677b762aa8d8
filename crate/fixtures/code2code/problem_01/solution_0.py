def total_age(tickets):
    total = 0
    for ticket in tickets:
        total += ticket.age
    return total
